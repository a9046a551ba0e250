"""Maximum-correlation tests for complete independence in high dimension."""
__version__ = "0.1.0"

from .approximations import (
    ApproxKind,
    ApproxParams,
    critical_value,
    intermediate_cdf,
    limit_cdf_Ltilde,
    limit_cdf_W,
    p_value,
    rate_gap,
)
from .coherence import CoherenceCertificate, certify, verify_on_sample
from .montecarlo import SimConfig, SimResult, estimate_levels, reproduce_table
from .numerics import chi2_sf, clipped_log, normal_sf, solve_monotone
from .statistics import (
    StatValue,
    load_csv,
    max_abs_correlation,
    mutual_coherence,
    statistic_L_general,
    statistic_L_tilde,
    statistic_W,
    statistic_W_general,
)
