"""Coherence and mutual coherence of (possibly unnormalized) dictionaries."""

from dataclasses import asdict, dataclass

import numpy as np

from .errors import DimensionMismatch, TooFewColumns
from .matrix_core import (
    DEFAULT_RANK_TOL,
    as_matrix,
    column_norm_extremes,
    column_norm_extremes_pair,
    gram,
    pseudoinverse,
)

__all__ = [
    "CoherenceProfile",
    "coherence",
    "mutual_coherence",
    "raw_max_offdiag",
    "effective_dictionary",
    "profile",
    "profile_from_effective",
]


@dataclass(frozen=True)
class CoherenceProfile:
    """Normalized (``mu_hat_*``) and raw coherence figures of a dictionary pair.

    The raw quantities are maxima of Gram magnitudes of the effective
    dictionaries ``B1 = A1 pinv(Psi1)`` and ``B2 = A2 pinv(Psi2)``; ``mu`` is
    the largest off-diagonal Gram magnitude of the concatenation ``[B1 B2]``.
    ``omega_min``/``omega_max`` are column-norm extremes over both.
    """

    mu_hat_1: float
    mu_hat_2: float
    mu_hat_m: float
    mu_hat_max: float
    mu_1: float
    mu_2: float
    mu_m: float
    mu: float
    omega_min: float
    omega_max: float

    def swapped(self):
        return CoherenceProfile(
            self.mu_hat_2, self.mu_hat_1, self.mu_hat_m, self.mu_hat_max,
            self.mu_2, self.mu_1, self.mu_m, self.mu, self.omega_min, self.omega_max,
        )

    def to_dict(self):
        return asdict(self)


def _offdiag_max(G):
    if G.shape[0] < 2:
        raise TooFewColumns("coherence needs at least two columns")
    mags = np.abs(G)
    np.fill_diagonal(mags, 0.0)
    return float(mags.max())


def raw_max_offdiag(M):
    """Largest off-diagonal magnitude of ``M^H M`` (no normalization)."""
    M = as_matrix(M)
    if M.shape[1] < 2:
        raise TooFewColumns("coherence needs at least two columns")
    column_norm_extremes(M)
    return _offdiag_max(gram(M, M))


def coherence(M):
    r"""Coherence :math:`\max_{i\ne j} |[M^H M]_{ij}| / \omega_{min}^2(M)`."""
    M = as_matrix(M)
    if M.shape[1] < 2:
        raise TooFewColumns("coherence needs at least two columns")
    w = column_norm_extremes(M)
    return _offdiag_max(gram(M, M)) / w.omega_min**2


def mutual_coherence(M, N):
    """Largest ``|[M^H N]_{ij}|`` over all (i, j), diagonal included,
    divided by the squared smallest column norm of both dictionaries."""
    M = as_matrix(M, "M")
    N = as_matrix(N, "N")
    if M.shape[0] != N.shape[0]:
        raise DimensionMismatch(f"row counts differ: {M.shape[0]} vs {N.shape[0]}")
    w = column_norm_extremes_pair(M, N)
    return float(np.abs(gram(M, N)).max()) / w.omega_min**2


def effective_dictionary(A, Psi, rank_tol=DEFAULT_RANK_TOL):
    A = as_matrix(A, "A")
    Psi = as_matrix(Psi, "Psi")
    if A.shape[1] != Psi.shape[1]:
        raise DimensionMismatch(f"A has {A.shape[1]} columns but Psi has {Psi.shape[1]}")
    return A @ pseudoinverse(Psi, rank_tol)


def profile_from_effective(B1, B2):
    B1 = as_matrix(B1, "B1")
    B2 = as_matrix(B2, "B2")
    if B1.shape[0] != B2.shape[0]:
        raise DimensionMismatch(f"row counts differ: {B1.shape[0]} vs {B2.shape[0]}")
    mu_hat_1 = coherence(B1)
    mu_hat_2 = coherence(B2)
    w = column_norm_extremes_pair(B1, B2)
    # both orientations so the result is exactly symmetric under swapping
    mu_m = max(float(np.abs(gram(B1, B2)).max()), float(np.abs(gram(B2, B1)).max()))
    mu_hat_m = mu_m / w.omega_min**2
    mu_1 = raw_max_offdiag(B1)
    mu_2 = raw_max_offdiag(B2)
    return CoherenceProfile(
        mu_hat_1=mu_hat_1,
        mu_hat_2=mu_hat_2,
        mu_hat_m=mu_hat_m,
        mu_hat_max=max(mu_hat_1, mu_hat_2, mu_hat_m),
        mu_1=mu_1,
        mu_2=mu_2,
        mu_m=mu_m,
        # off-diagonal of the stacked Gram = both diagonal blocks + cross block
        mu=max(mu_1, mu_2, mu_m),
        omega_min=w.omega_min,
        omega_max=w.omega_max,
    )


def profile(A1, Psi1, A2, Psi2, rank_tol=DEFAULT_RANK_TOL):
    """Coherence profile of the pair ``(A1 pinv(Psi1), A2 pinv(Psi2))``."""
    return profile_from_effective(
        effective_dictionary(A1, Psi1, rank_tol),
        effective_dictionary(A2, Psi2, rank_tol),
    )
