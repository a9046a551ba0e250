"""Probabilistic coherence certificates for random dictionaries.

For an n x p dictionary with i.i.d. centred entries, the mutual coherence M
satisfies ``n M^2 - (4 log p - log log p) <= y_alpha`` with probability about
``1 - alpha``, where ``y_alpha`` is the ``1 - alpha`` quantile of the d = 1
intermediate approximation. Then ``1/M >= m_alpha`` and every x with fewer
than ``(1 + m_alpha) / 2`` nonzeros is the unique sparsest solution of
``Ax = b`` and is recovered by l1 minimisation.
"""
import math
from dataclasses import asdict, dataclass

import numpy as np

from .approximations import ApproxKind, ApproxParams, critical_value
from .statistics import mutual_coherence

__all__ = ["CoherenceCertificate", "InfeasibleCertificateError", "certify", "verify_on_sample"]


class InfeasibleCertificateError(ValueError):
    pass


@dataclass(frozen=True)
class CoherenceCertificate:
    n: int
    p: int
    alpha: float
    y_alpha: float
    alpha_p: float
    m_alpha: float
    sparsity_threshold: float

    @property
    def coherence_bound(self):
        """Upper bound ``1 / m_alpha`` on the mutual coherence."""
        return 1.0 / self.m_alpha

    @property
    def nontrivial(self):
        """False when only ``x = 0`` is certified (threshold at most 1)."""
        return self.sparsity_threshold > 1.0

    @property
    def max_sparsity(self):
        """Largest nonzero count strictly below the threshold."""
        return max(0, math.ceil(self.sparsity_threshold) - 1)

    def to_dict(self):
        out = asdict(self)
        out.update(
            coherence_bound=self.coherence_bound,
            nontrivial=self.nontrivial,
            max_sparsity=self.max_sparsity,
        )
        return out


def certify(n, p, alpha):
    if n < 4 or p < 2:
        raise ValueError(f"need n >= 4 and p >= 2, got n={n}, p={p}")
    params = ApproxParams(p=p, n=n, d=1)
    y = critical_value(params, ApproxKind.INTERMEDIATE, alpha)
    radicand = y + params.alpha_p
    if not radicand > 0:
        raise InfeasibleCertificateError(
            f"y_alpha + alpha_p = {radicand:.6g} <= 0 at p={p}, alpha={alpha}; "
            "increase n or alpha"
        )
    m = math.sqrt(n / radicand)
    return CoherenceCertificate(n, p, float(alpha), y, params.alpha_p, m, 0.5 * (1.0 + m))


def verify_on_sample(dictionary, certificate):
    """Return ``(M, bound_holds)`` with ``bound_holds`` iff ``n M^2 <= y_alpha + alpha_p``."""
    a = np.asarray(dictionary, dtype=float)
    if a.shape != (certificate.n, certificate.p):
        raise ValueError(
            f"dictionary shape {a.shape} does not match certificate ({certificate.n}, {certificate.p})"
        )
    m, _ = mutual_coherence(a)
    return m, bool(certificate.n * m * m <= certificate.y_alpha + certificate.alpha_p)
