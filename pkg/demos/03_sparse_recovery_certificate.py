"""Certifying l0/l1 equivalence for a random Gaussian dictionary.

For an n x p matrix with i.i.d. entries, with probability about 1 - alpha every
vector with fewer than (1 + m_alpha)/2 nonzeros is the unique sparsest
solution of Ax = b and l1 minimisation finds it.
"""
import numpy as np

from himax import certify, mutual_coherence, verify_on_sample

# %% Certificates across sizes
for n, p in [(128, 64), (1024, 256), (4096, 1024), (16384, 4096)]:
    c = certify(n, p, 0.05)
    print(f"n={n:6d} p={p:5d}  y_alpha={c.y_alpha:7.3f}  m_alpha={c.m_alpha:6.3f}  "
          f"sparsity < {c.sparsity_threshold:.2f}  (up to {c.max_sparsity} nonzeros)")

# %% Checking the bound on draws
rng = np.random.default_rng(7)
cert = certify(1024, 256, 0.05)
violations = 0
for _ in range(200):
    a = rng.standard_normal((1024, 256))
    m, holds = verify_on_sample(a, cert)
    violations += not holds
print(f"coherence bound 1/m_alpha = {cert.coherence_bound:.4f}; "
      f"violated in {violations}/200 draws; last M = {mutual_coherence(a)[0]:.4f}")
