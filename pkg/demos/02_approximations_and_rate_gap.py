"""How far is the Gumbel limit from the intermediate chi-square approximation?

The maximum squared correlation, centred by 4 log p - log log p, has a Gumbel
limit, but the pre-limit expression exp(-(p^2 - p)/2 P(chi2(1) >= ...))
approaches the truth much faster. The gap between the two closes only like
loglog p / log p.
"""
import numpy as np

from himax import ApproxParams, critical_value, intermediate_cdf, limit_cdf_Ltilde, rate_gap

# %% Critical values at alpha = 0.05 for growing p
print(f"{'p':>10} {'limit':>8} {'intermediate':>13}")
y_lim = critical_value(None, "limit_Ltilde", 0.05)
for p in (4, 16, 128, 1024, 10**6):
    y_int = critical_value(ApproxParams(p=p, d=1), "intermediate", 0.05)
    print(f"{p:>10} {y_lim:8.4f} {y_int:13.4f}")

# %% CDF gap on a y grid
ys = np.linspace(-2, 8, 6)
for p in (1e3, 1e8, 1e20):
    params = ApproxParams(p=p, d=1)
    gaps = [intermediate_cdf(params, y) - limit_cdf_Ltilde(y) for y in ys]
    print(f"p = {p:.0e}: " + "  ".join(f"{g:+.5f}" for g in gaps))

# %% Exact gap against the first-order expansion
for y in (-1.0, 0.0, 2.0):
    for p in (1e3, 1e8, 1e20, 1e50):
        exact, pred = rate_gap(p, y)
        print(f"y={y:+.0f} p={p:.0e} exact={exact:+.3e} first-order={pred:.3e} ratio={exact / pred:+.3f}")
