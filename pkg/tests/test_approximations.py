import math

import mpmath
import numpy as np
import pytest

from himax.approximations import (
    ApproxKind,
    ApproxParams,
    IncompatibleApproximationError,
    cdf,
    critical_value,
    intermediate_cdf,
    limit_cdf_Ltilde,
    limit_cdf_W,
    p_value,
    rate_gap,
)
from himax.numerics import BracketError
from himax.statistics import StatValue

SQRT_8PI = math.sqrt(8 * math.pi)


def mp_intermediate_d1(p, y):
    """High-precision d = 1 intermediate CDF, built from erfc."""
    mpmath.mp.dps = 60
    p = mpmath.mpf(p)
    lp = max(mpmath.log(p), 1)
    a = 4 * lp - max(mpmath.log(lp), 1) + y
    return mpmath.exp(-(p * p - p) / 2 * mpmath.erfc(mpmath.sqrt(a / 2)))


def mp_limit_L(y):
    return mpmath.exp(-mpmath.exp(-mpmath.mpf(y) / 2) / mpmath.sqrt(8 * mpmath.pi))


def test_params_centering():
    assert ApproxParams(p=4, d=2).alpha_p == pytest.approx(4 * math.log(4))
    assert ApproxParams(p=4, d=1).alpha_p == pytest.approx(4 * math.log(4) - 1)
    big = ApproxParams(p=10**6, d=3)
    assert big.alpha_p == pytest.approx(4 * math.log(1e6) + math.log(math.log(1e6)))
    with pytest.raises(ValueError):
        ApproxParams(p=1)


def test_limit_cdf_W_examples():
    y95 = -2 * math.log(-2 * math.log(0.95))
    assert y95 == pytest.approx(4.5541, abs=1e-4)
    assert limit_cdf_W(y95) == pytest.approx(0.95, abs=1e-15)
    assert 1 - limit_cdf_W(100) < 1e-20
    assert limit_cdf_W(0) == pytest.approx(0.6065306597126334, rel=1e-15)


def test_limit_cdf_Ltilde_examples():
    assert limit_cdf_Ltilde(2.716219070555093) == pytest.approx(0.95, abs=1e-15)
    assert limit_cdf_Ltilde(0) == pytest.approx(0.8191638613764112, rel=1e-15)
    assert limit_cdf_Ltilde(5) > limit_cdf_Ltilde(4)


def test_limits_at_extremes():
    assert limit_cdf_W(-2000) == 0.0
    assert limit_cdf_Ltilde(-2000) == 0.0
    assert limit_cdf_W(2000) == 1.0


def test_intermediate_examples():
    assert intermediate_cdf(ApproxParams(p=4, d=2), 0.0) == pytest.approx(
        0.6872892787909722, rel=1e-13)
    assert intermediate_cdf(ApproxParams(p=10, d=1), 60) == pytest.approx(1.0, abs=1e-12)
    expected = float(mp_intermediate_d1(10, 0))
    assert intermediate_cdf(ApproxParams(p=10, d=1), 0.0) == pytest.approx(expected, rel=1e-12)
    # composing with the erfc form directly
    a = 4 * math.log(10) - 1.0
    assert intermediate_cdf(ApproxParams(p=10, d=1), 0.0) == pytest.approx(
        math.exp(-45 * math.erfc(math.sqrt(a / 2))), rel=1e-12)


def test_intermediate_d2_closed_form():
    # p >= 3 so that log p is unclipped and exp(-alpha_p / 2) = p^-2
    for p in (3, 7, 50, 1000, 10**6):
        params = ApproxParams(p=p, d=2)
        for y in np.linspace(-params.alpha_p, 40, 200):
            closed = math.exp(-((1 - 1 / p) / 2) * math.exp(-y / 2))
            assert intermediate_cdf(params, y) == pytest.approx(closed, abs=1e-12)


def test_all_cdfs_monotone_and_bounded():
    ys = np.linspace(-30, 60, 10_000)
    curves = [
        [limit_cdf_W(y) for y in ys],
        [limit_cdf_Ltilde(y) for y in ys],
        [intermediate_cdf(ApproxParams(p=64, d=1), y) for y in ys],
        [intermediate_cdf(ApproxParams(p=64, d=3), y) for y in ys],
    ]
    for c in curves:
        c = np.array(c)
        assert np.all((c >= 0) & (c <= 1))
        assert np.all(np.diff(c) >= 0)
        assert np.max(np.abs(np.diff(c))) < 1e-2  # no jumps on a 0.009 grid


def test_intermediate_d2_converges_to_W_limit():
    params = ApproxParams(p=10**8, d=2)
    for y in np.linspace(-2, 10, 121):
        assert abs(intermediate_cdf(params, y) - limit_cdf_W(y)) < 1e-5


def test_intermediate_d1_converges_slowly_to_Ltilde_limit():
    # the d = 1 gap shrinks only like loglog p / log p: about 1e-3 at p = 1e8
    ys = np.linspace(-2, 10, 121)
    sups = []
    for p in (1e4, 1e8, 1e16, 1e32, 1e64):
        params = ApproxParams(p=p, d=1)
        sups.append(max(abs(intermediate_cdf(params, y) - limit_cdf_Ltilde(y)) for y in ys))
    assert all(a > b for a, b in zip(sups, sups[1:]))
    assert 1e-4 < sups[1] < 1e-2


def test_critical_value_examples():
    assert critical_value(None, "limit_W", 0.05) == pytest.approx(4.554096136964438, abs=1e-12)
    assert critical_value(None, "limit_Ltilde", 0.05) == pytest.approx(2.716219070555093, abs=1e-12)
    for p in (2, 4, 30, 500):
        params = ApproxParams(p=p, d=2)
        y = critical_value(params, "intermediate", 0.05)
        assert intermediate_cdf(params, y) == pytest.approx(0.95, abs=1e-9)


def test_critical_value_against_bisection_oracle():
    mpmath.mp.dps = 40
    params = ApproxParams(p=128, n=256, d=1)
    target = mpmath.mpf("0.95")
    lo, hi = mpmath.mpf(-params.alpha_p), mpmath.mpf(params.alpha_p + 100)
    for _ in range(200):
        mid = (lo + hi) / 2
        if mp_intermediate_d1(128, mid) < target:
            lo = mid
        else:
            hi = mid
    assert critical_value(params, "intermediate", 0.05) == pytest.approx(float(lo), abs=1e-9)


def test_critical_value_errors():
    with pytest.raises(ValueError):
        critical_value(None, "limit_W", 1.0)
    # p = 2, d = 1: at most one pair, cdf never drops below exp(-1)
    with pytest.raises(BracketError):
        critical_value(ApproxParams(p=2, d=1), "intermediate", 0.9)


@pytest.mark.parametrize("alpha", [0.01, 0.05, 0.1, 0.5])
@pytest.mark.parametrize(
    "kind, approx, d",
    [("W_n", "limit_W", 2), ("W_n", "intermediate", 2), ("L_tilde_centered", "limit_Ltilde", 1),
     ("L_tilde_centered", "intermediate", 1), ("L_pn_general", "intermediate", 3)],
)
def test_critical_value_and_p_value_are_inverse(alpha, kind, approx, d):
    params = ApproxParams(p=40, n=100, d=d)
    y = critical_value(params, approx, alpha)
    stat = StatValue(kind, y, 40, 100, d, (0, 1))
    assert p_value(stat, approx, params) == pytest.approx(alpha, abs=1e-8)


def test_p_value_examples():
    stat = StatValue("W_n", 0.0, 10, 50, 2, (0, 1))
    assert p_value(stat, "limit_W") == pytest.approx(0.3934693402873666, rel=1e-14)
    big = StatValue("W_n", 200.0, 10, 50, 2, (0, 1))
    assert p_value(big, "limit_W") < 1e-40
    assert p_value(big, "intermediate") < 1e-40


def test_p_value_rejects_bad_pairing():
    w = StatValue("W_n", 1.0, 10, 50, 2, (0, 1))
    lt = StatValue("L_tilde_centered", 1.0, 10, 50, 1, (0, 1))
    with pytest.raises(IncompatibleApproximationError):
        p_value(w, "limit_Ltilde")
    with pytest.raises(IncompatibleApproximationError):
        p_value(lt, "limit_W")
    with pytest.raises(IncompatibleApproximationError):
        p_value(lt, "intermediate", ApproxParams(p=10, d=2))
    with pytest.raises(IncompatibleApproximationError):
        p_value(StatValue("W_pn_general", 1.0, 10, 5, 3, (0, 1)), "limit_W")


def test_generic_cdf_dispatch():
    assert cdf(ApproxKind.LIMIT_W, 1.3) == limit_cdf_W(1.3)
    with pytest.raises(ValueError):
        cdf("intermediate", 1.0)


@pytest.mark.parametrize("p", [3, 10, 1e3, 1e6, 1e8, 1e20])
@pytest.mark.parametrize("y", [-2.0, -1.0, 0.0, 2.0, 6.0])
def test_rate_gap_exact_part_matches_high_precision(p, y):
    exact, _ = rate_gap(p, y)
    expected = float(mp_intermediate_d1(p, y) - mp_limit_L(y))
    assert exact == pytest.approx(expected, rel=1e-8, abs=1e-15)


def test_rate_gap_prediction_formula():
    p, y = 1e6, 0.5
    lp = math.log(p)
    expected = math.log(lp) / (8 * lp) / SQRT_8PI * math.exp(-y / 2 - math.exp(-y / 2) / SQRT_8PI)
    assert rate_gap(p, y)[1] == pytest.approx(expected, rel=1e-14)


def test_rate_gap_vanishes_in_upper_tail():
    exact, pred = rate_gap(1e4, 80.0)
    assert abs(exact) < 1e-15 and pred < 1e-15


def test_rate_gap_sign_follows_expansion():
    # intermediate rate exceeds the limiting rate by a factor 1 + A with
    # A ~ (loglog p - y - 2) / (8 log p), so the gap is negative once loglog p > y + 2
    for y in (-1.0, 0.0):
        ratios = [rate_gap(p, y)[0] / rate_gap(p, y)[1] for p in (1e6, 1e8, 1e12, 1e20, 1e50)]
        assert all(r < 0 for r in ratios)
        assert all(a > b for a, b in zip(ratios, ratios[1:]))
    assert rate_gap(1e3, 2.0)[0] > 0


def test_rate_gap_rejects_tiny_p():
    with pytest.raises(ValueError):
        rate_gap(2, 0.0)
