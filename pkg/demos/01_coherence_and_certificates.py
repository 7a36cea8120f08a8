"""Coherence profiles and recovery certificates.

Spikes (identity) and cosines (DCT) are maximally incoherent: every inner
product between a spike and a cosine is at most sqrt(2/d).  This script
shows how that single number controls how many nonzeros per component can
be guaranteed, and how the guarantee degrades once a random measurement
matrix mixes the two dictionaries.

    python demos/01_coherence_and_certificates.py
"""

import numpy as np

from sparsesep import certify, from_analysis, threshold_split
from sparsesep.guarantees import max_admissible
from sparsesep.operators import dct_matrix

for d in (16, 32, 64, 128):
    p = from_analysis(np.eye(d), np.eye(d), dct_matrix(d))
    prof = p.profile()
    thr = threshold_split(prof)
    print(f"d={d:4d}  mu_hat_m={prof.mu_hat_m:.4f}  threshold={thr:.3f}  "
          f"max k1+k2={max_admissible(thr)}")

# A certificate turns the threshold into an explicit error bound
# C0 * eps + C1 * (sigma_k1 + sigma_k2).
d = 64
p = from_analysis(np.eye(d), np.eye(d), dct_matrix(d))
cert = certify(p.profile(), p.sigma_min_psi, k1=2, k2=1, epsilon=0.1, sigma_k1=0.01)
print("\ncertificate for d=64, (k1, k2) = (2, 1), eps = 0.1:")
for key in ("satisfied", "route", "C0", "C1", "predicted_bound"):
    print(f"  {key:16s} {getattr(cert, key)}")

# Compressing with a Gaussian matrix raises every coherence figure.
rng = np.random.default_rng(0)
for m in (64, 48, 32):
    A = rng.standard_normal((m, d)) / np.sqrt(m)
    prof = from_analysis(A, np.eye(d), dct_matrix(d)).profile()
    print(f"m={m:3d}  mu_hat_1={prof.mu_hat_1:.3f}  mu_hat_m={prof.mu_hat_m:.3f}  "
          f"max k1+k2={max_admissible(threshold_split(prof))}")
