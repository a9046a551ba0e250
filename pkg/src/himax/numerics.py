"""Scalar kernels: clipped logarithm, chi-square and normal tails, root finding.

Every place the test statistics write ``log`` the clipped logarithm
``ln(max(x, e))`` is meant, so ``clipped_log(x) >= 1`` always.
"""
import math

__all__ = [
    "clipped_log",
    "clipped_loglog",
    "chi2_sf",
    "normal_sf",
    "solve_monotone",
    "BracketError",
]

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 10_000


class BracketError(ValueError):
    """Target value not enclosed by the image of the bracket."""


def _check_finite(x, name="x"):
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"{name} must be finite, got {x!r}")
    return x


def clipped_log(x):
    """Return ``ln(max(x, e))``."""
    x = _check_finite(x)
    return math.log(x) if x > math.e else 1.0


def clipped_loglog(x):
    """Return ``clipped_log(clipped_log(x))``."""
    return clipped_log(clipped_log(x))


def _gamma_series(a, x):
    # lower regularized P(a, x), valid for x < a + 1
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_contfrac(a, x):
    # upper regularized Q(a, x) by modified Lentz, valid for x >= a + 1
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def chi2_sf(d, x):
    """Upper tail ``P(chi2(d) >= x)`` via the regularized incomplete gamma Q(d/2, x/2)."""
    if int(d) != d or d < 1:
        raise ValueError(f"degrees of freedom must be a positive integer, got {d!r}")
    x = _check_finite(x)
    if x <= 0.0:
        return 1.0
    a = 0.5 * d
    z = 0.5 * x
    if d == 2:
        return math.exp(-z)
    if z < a + 1.0:
        return max(0.0, 1.0 - _gamma_series(a, z))
    return _gamma_contfrac(a, z)


def normal_sf(x):
    """Standard normal upper tail ``1 - Phi(x)``."""
    x = _check_finite(x)
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def solve_monotone(f, target, bracket, tol=1e-10, max_iter=200):
    """Find ``y`` in ``bracket`` with ``|f(y) - target| <= tol`` for monotone ``f``.

    Bisection safeguarded with an Illinois-style false-position step, so the
    bracket always shrinks and convergence is at least linear.
    """
    lo, hi = (float(b) for b in bracket)
    if not lo < hi:
        raise BracketError(f"empty bracket [{lo}, {hi}]")
    g_lo = f(lo) - target
    g_hi = f(hi) - target
    if abs(g_lo) <= tol:
        return lo
    if abs(g_hi) <= tol:
        return hi
    if g_lo * g_hi > 0:
        raise BracketError(
            f"target {target!r} outside [f({lo}), f({hi})] = [{g_lo + target!r}, {g_hi + target!r}]"
        )
    side = 0
    for it in range(max_iter):
        if it % 2 == 0:
            y = (lo * g_hi - hi * g_lo) / (g_hi - g_lo)
            if not lo < y < hi:
                y = 0.5 * (lo + hi)
        else:
            y = 0.5 * (lo + hi)
        g = f(y) - target
        if abs(g) <= tol or hi - lo <= 4 * math.ulp(max(abs(lo), abs(hi))):
            return y
        if g * g_lo > 0:
            lo, g_lo = y, g
            if side == -1:
                g_hi *= 0.5
            side = -1
        else:
            hi, g_hi = y, g
            if side == 1:
                g_lo *= 0.5
            side = 1
    raise BracketError(f"no convergence after {max_iter} iterations; last residual {g!r}")
