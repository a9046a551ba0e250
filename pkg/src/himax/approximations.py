"""Limiting and intermediate distribution approximations for the statistics.

Three CDFs are available:

* ``limit_W``: ``exp(-exp(-y/2) / 2)``, the Gumbel limit of ``W_n``;
* ``limit_Ltilde``: ``exp(-exp(-y/2) / sqrt(8 pi))``, the Gumbel limit of the
  centred ``n Ltilde^2`` statistic;
* ``intermediate``: ``exp(-(p^2 - p)/2 * P(chi2(d) >= alpha_p + y))``, the
  pre-limit expression, which approaches the truth far faster.
"""
import math
from dataclasses import dataclass, field
from enum import Enum

from .numerics import chi2_sf, clipped_log, clipped_loglog, solve_monotone
from .statistics import centering_constant

__all__ = [
    "ApproxKind",
    "ApproxParams",
    "IncompatibleApproximationError",
    "limit_cdf_W",
    "limit_cdf_Ltilde",
    "intermediate_cdf",
    "cdf",
    "survival",
    "critical_value",
    "p_value",
    "rate_gap",
    "params_for",
]

_SQRT_8PI = math.sqrt(8.0 * math.pi)


class ApproxKind(str, Enum):
    LIMIT_W = "limit_W"
    LIMIT_LTILDE = "limit_Ltilde"
    INTERMEDIATE = "intermediate"


class IncompatibleApproximationError(ValueError):
    pass


@dataclass(frozen=True)
class ApproxParams:
    p: int
    n: int = 0
    d: int = 1
    alpha_p: float = field(init=False)

    def __post_init__(self):
        if self.p < 2:
            raise ValueError(f"p must be >= 2, got {self.p}")
        if self.d < 1:
            raise ValueError(f"d must be >= 1, got {self.d}")
        object.__setattr__(self, "alpha_p", centering_constant(self.p, self.d))

    @property
    def pairs(self):
        return 0.5 * (float(self.p) * self.p - self.p)


def _gumbel_rate(y, scale):
    # scale * exp(-y/2), saturating instead of overflowing for very negative y
    e = -0.5 * y + math.log(scale)
    return math.exp(min(e, 700.0))


def limit_cdf_W(y):
    return math.exp(-_gumbel_rate(y, 0.5))


def limit_cdf_Ltilde(y):
    return math.exp(-_gumbel_rate(y, 1.0 / _SQRT_8PI))


def _intermediate_rate(params, y):
    return params.pairs * chi2_sf(params.d, params.alpha_p + y)


def intermediate_cdf(params, y):
    return math.exp(-_intermediate_rate(params, y))


def _rate(approx, params, y):
    approx = ApproxKind(approx)
    if approx is ApproxKind.LIMIT_W:
        return _gumbel_rate(y, 0.5)
    if approx is ApproxKind.LIMIT_LTILDE:
        return _gumbel_rate(y, 1.0 / _SQRT_8PI)
    if params is None:
        raise ValueError("the intermediate approximation needs ApproxParams")
    return _intermediate_rate(params, y)


def cdf(approx, y, params=None):
    return math.exp(-_rate(approx, params, y))


def survival(approx, y, params=None):
    """``1 - cdf``, computed without cancellation for small tails."""
    return -math.expm1(-_rate(approx, params, y))


def critical_value(params, approx, alpha):
    """Return ``y`` with ``cdf(y) = 1 - alpha``.

    Closed form for the two limits; for the intermediate CDF a bracketed root
    search over ``[-alpha_p + 1e-8, alpha_p + 100]`` keeps the chi-square
    argument non-negative.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    approx = ApproxKind(approx)
    target_rate = -math.log1p(-alpha)
    if approx is ApproxKind.LIMIT_W:
        return -2.0 * math.log(2.0 * target_rate)
    if approx is ApproxKind.LIMIT_LTILDE:
        return -2.0 * math.log(_SQRT_8PI * target_rate)
    if params is None:
        raise ValueError("the intermediate approximation needs ApproxParams")
    # solve on the log of the Poisson rate: monotone, well scaled across many decades
    lo = -params.alpha_p + 1e-8
    hi = params.alpha_p + 100.0
    log_target = math.log(target_rate)

    def log_rate(y):
        r = _intermediate_rate(params, y)
        return math.log(r) if r > 0 else -1e300

    return solve_monotone(lambda t: -log_rate(t), -log_target, (lo, hi), tol=1e-13)


def params_for(stat):
    """Default ApproxParams for a statistic: d = 1 for Ltilde, 2 for W_n, else the block count."""
    d = {"L_tilde_centered": 1, "W_n": 2}.get(stat.kind, stat.d)
    return ApproxParams(p=stat.p, n=stat.n, d=d)


def p_value(stat, approx, params=None):
    """``1 - cdf(stat.value)`` under a compatible approximation."""
    approx = ApproxKind(approx)
    if params is None:
        params = params_for(stat)
    if params.p != stat.p:
        raise IncompatibleApproximationError(
            f"params.p={params.p} does not match the statistic's p={stat.p}"
        )
    ok = {
        "W_n": approx is ApproxKind.LIMIT_W or (approx is ApproxKind.INTERMEDIATE and params.d == 2),
        "L_tilde_centered": approx is ApproxKind.LIMIT_LTILDE
        or (approx is ApproxKind.INTERMEDIATE and params.d == 1),
    }.get(stat.kind, approx is ApproxKind.INTERMEDIATE and params.d == stat.d)
    if not ok:
        raise IncompatibleApproximationError(
            f"statistic {stat.kind} (d={stat.d}) cannot be paired with {approx.value} (d={params.d})"
        )
    return survival(approx, stat.value, params)


def rate_gap(p, y):
    """Gap between the d = 1 intermediate CDF and its Gumbel limit, with n = p.

    Returns ``(exact_gap, asymptotic_prediction)`` where the prediction is
    ``(loglog n / (8 log n)) / sqrt(8 pi) * exp(-y/2 - exp(-y/2) / sqrt(8 pi))``.
    """
    if p < 3:
        raise ValueError(f"p must be >= 3, got {p}")
    params = ApproxParams(p=p, n=p, d=1)
    lam = _intermediate_rate(params, y)
    lam0 = _gumbel_rate(y, 1.0 / _SQRT_8PI)
    exact = math.exp(-lam0) * math.expm1(lam0 - lam)
    n = p
    prediction = (
        clipped_loglog(n) / (8.0 * clipped_log(n)) / _SQRT_8PI * math.exp(-0.5 * y - lam0)
    )
    return exact, prediction
