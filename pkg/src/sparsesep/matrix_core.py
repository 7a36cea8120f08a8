"""Dense matrix primitives: validation, SVD pseudoinverse, column norms, Gram.

Matrices are plain 2-D :class:`numpy.ndarray` objects.  Real input stays
``float64`` (a real matrix is its own zero-imaginary-part embedding in the
complex field); anything complex is promoted to ``complex128``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonFinite, RankDeficient, ZeroColumn

__all__ = [
    "ColumnNormSummary",
    "as_matrix",
    "as_vector",
    "pseudoinverse",
    "smallest_singular_value",
    "column_norms",
    "column_norm_extremes",
    "column_norm_extremes_pair",
    "gram",
    "DEFAULT_RANK_TOL",
]

DEFAULT_RANK_TOL = 1e-10


@dataclass(frozen=True)
class ColumnNormSummary:
    omega_min: float
    omega_max: float


def _dtype_for(a):
    return np.complex128 if np.iscomplexobj(a) else np.float64


def as_matrix(M, name="matrix"):
    """Return `M` as a finite 2-D float64/complex128 array.

    A 1-D input is treated as a single column.
    """
    a = np.asarray(M)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {a.shape}")
    if a.shape[0] == 0 or a.shape[1] == 0:
        raise DimensionMismatch(f"{name} is empty (shape {a.shape})")
    a = a.astype(_dtype_for(a), copy=False)
    if not np.all(np.isfinite(a)):
        raise NonFinite(f"{name} contains NaN or Inf entries")
    return a


def as_vector(x, name="vector"):
    a = np.asarray(x)
    if a.ndim == 2 and a.shape[1] == 1:
        a = a[:, 0]
    if a.ndim != 1:
        raise DimensionMismatch(f"{name} must be 1-D, got shape {a.shape}")
    a = a.astype(_dtype_for(a), copy=False)
    if not np.all(np.isfinite(a)):
        raise NonFinite(f"{name} contains NaN or Inf entries")
    return a


def pseudoinverse(M, rank_tol=DEFAULT_RANK_TOL):
    """Moore-Penrose left inverse of a full-column-rank matrix.

    Parameters
    ----------
    M : array_like, shape (n, p)
    rank_tol : float
        Relative tolerance.  `M` is rank deficient when its smallest singular
        value is at most ``rank_tol`` times the largest one.

    Returns
    -------
    P : ndarray, shape (p, n)
        Satisfies ``P @ M == I_p`` up to rounding.

    Raises
    ------
    RankDeficient
        If `M` does not have full column rank relative to `rank_tol`.
    """
    M = as_matrix(M)
    n, p = M.shape
    if n < p:
        raise RankDeficient(f"{n}x{p} matrix cannot have full column rank")
    U, s, Vh = np.linalg.svd(M, full_matrices=False)
    if s[-1] <= rank_tol * s[0]:
        raise RankDeficient(
            f"smallest singular value {s[-1]:.3e} <= {rank_tol:g} * {s[0]:.3e}"
        )
    return (Vh.conj().T / s) @ U.conj().T


def smallest_singular_value(M):
    """Smallest singular value, ``min(n, p)``-th in descending order."""
    M = as_matrix(M)
    return float(np.linalg.svd(M, compute_uv=False)[-1])


def column_norms(M):
    return np.linalg.norm(as_matrix(M), axis=0)


def column_norm_extremes(M):
    """Smallest and largest column l2-norm of `M`.

    Raises
    ------
    ZeroColumn
        If any column of `M` is identically zero; the reported index is the
        first such column.
    """
    norms = column_norms(M)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise ZeroColumn(int(zero[0]))
    return ColumnNormSummary(float(norms.min()), float(norms.max()))


def column_norm_extremes_pair(M, N):
    a = column_norm_extremes(M)
    try:
        b = column_norm_extremes(N)
    except ZeroColumn as exc:
        # index counted in the concatenation [M N]
        raise ZeroColumn(exc.index + as_matrix(M).shape[1]) from None
    return ColumnNormSummary(min(a.omega_min, b.omega_min), max(a.omega_max, b.omega_max))


def gram(M, N):
    """Cross-Gram matrix ``M^H N``."""
    M = as_matrix(M, "M")
    N = as_matrix(N, "N")
    if M.shape[0] != N.shape[0]:
        raise DimensionMismatch(f"row counts differ: {M.shape[0]} vs {N.shape[0]}")
    return M.conj().T @ N
