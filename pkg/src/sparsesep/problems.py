"""Assembly of the two-component separation problem.

Every flavor is reduced to the same template::

    minimize    ||Psi1 x1||_1 + ||Psi2 x2||_1
    subject to  ||y - A1 x1 - A2 x2||_2 <= eps

and then to a single-block problem on ``x = [x1; x2]`` with
``A = [A1 A2]`` and ``Psi = blockdiag(Psi1, Psi2)``.

Operators may be dense arrays or :mod:`scipy.sparse` matrices; the stacked
forms are sparse exactly when an input was.
"""

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .coherence import profile as _profile
from .errors import DimensionMismatch, NonFinite, RankDeficient
from .matrix_core import DEFAULT_RANK_TOL, as_matrix, as_vector

__all__ = [
    "Flavor",
    "SeparationProblem",
    "SplitSolution",
    "from_analysis",
    "from_synthesis",
    "from_hybrid",
    "from_blocks",
    "split_solution",
    "singular_value_range",
]


class Flavor(str, enum.Enum):
    ANALYSIS = "analysis"
    SYNTHESIS = "synthesis"
    HYBRID = "hybrid"


def _operator(M, name):
    if sp.issparse(M):
        M = sp.csr_array(M)
        if not np.all(np.isfinite(M.data)):
            raise NonFinite(f"{name} contains NaN or Inf entries")
        return M
    return as_matrix(M, name)


def _dense(M):
    return M.toarray() if sp.issparse(M) else M


def singular_value_range(M):
    s = np.linalg.svd(_dense(M), compute_uv=False)
    return float(s[-1]), float(s[0])


def _require_full_column_rank(M, name, rank_tol):
    n, p = M.shape
    if n < p:
        raise RankDeficient(f"{name} is {n}x{p}; needs at least as many rows as columns")
    smin, smax = singular_value_range(M)
    if smin <= rank_tol * smax:
        raise RankDeficient(f"{name}: sigma_min {smin:.3e} <= {rank_tol:g} * sigma_max {smax:.3e}")
    return smin


def _require_full_row_rank(D, name, rank_tol):
    d, n = D.shape
    if d > n:
        raise DimensionMismatch(f"{name} is {d}x{n}; a dictionary needs d <= n")
    smin, smax = singular_value_range(D)
    if smin <= rank_tol * smax:
        raise RankDeficient(f"{name} does not have full row rank")


def _identity(n, like):
    return sp.identity(n, format="csr") if sp.issparse(like) else np.eye(n)


@dataclass(frozen=True, eq=False)
class SeparationProblem:
    """Two-component problem plus its concatenated single-block form.

    For synthesis blocks the unknown is the coefficient vector ``s`` and the
    analysis operator is the identity on coefficient space, so the effective
    dictionary is ``A D``.
    """

    A1: object
    A2: object
    Psi1: object
    Psi2: object
    flavor: Flavor
    stacked_A: object
    stacked_Psi: object
    D1: object = None
    D2: object = None
    sigma_min_psi: float = None

    @property
    def component_dims(self):
        return self.A1.shape[1], self.A2.shape[1]

    @property
    def m(self):
        return self.A1.shape[0]

    def profile(self, rank_tol=DEFAULT_RANK_TOL):
        return _profile(_dense(self.A1), _dense(self.Psi1),
                            _dense(self.A2), _dense(self.Psi2), rank_tol)

    def objective(self, x1, x2):
        return float(np.abs(self.Psi1 @ x1).sum() + np.abs(self.Psi2 @ x2).sum())

    def summary(self):
        d1, d2 = self.component_dims
        return {
            "flavor": self.flavor.value,
            "m": self.m,
            "d1": d1,
            "d2": d2,
            "n1": self.Psi1.shape[0],
            "n2": self.Psi2.shape[0],
            "stacked_A_shape": list(self.stacked_A.shape),
            "stacked_Psi_shape": list(self.stacked_Psi.shape),
            "sigma_min_psi": self.sigma_min_psi,
        }


def _build(A1, A2, Psi1, Psi2, flavor, rank_tol, D1=None, D2=None):
    if A1.shape[0] != A2.shape[0]:
        raise DimensionMismatch(f"A1 has {A1.shape[0]} rows, A2 has {A2.shape[0]}")
    for A, Psi, tag in ((A1, Psi1, "1"), (A2, Psi2, "2")):
        if A.shape[1] != Psi.shape[1]:
            raise DimensionMismatch(
                f"A{tag} has {A.shape[1]} columns but Psi{tag} has {Psi.shape[1]}")
    s1 = _require_full_column_rank(Psi1, "Psi1", rank_tol)
    s2 = _require_full_column_rank(Psi2, "Psi2", rank_tol)
    if any(sp.issparse(M) for M in (A1, A2, Psi1, Psi2)):
        stacked_A = sp.hstack([sp.csr_array(A1), sp.csr_array(A2)], format="csr")
        stacked_Psi = sp.block_diag([sp.csr_array(Psi1), sp.csr_array(Psi2)], format="csr")
    else:
        stacked_A = np.hstack([A1, A2])
        stacked_Psi = scipy.linalg.block_diag(Psi1, Psi2)
    return SeparationProblem(
        A1=A1, A2=A2, Psi1=Psi1, Psi2=Psi2, flavor=flavor,
        stacked_A=stacked_A, stacked_Psi=stacked_Psi, D1=D1, D2=D2,
        sigma_min_psi=min(s1, s2),
    )


def from_analysis(A, Psi1, Psi2, rank_tol=DEFAULT_RANK_TOL):
    """Both components live in signal space and share the measurement matrix."""
    A = _operator(A, "A")
    Psi1 = _operator(Psi1, "Psi1")
    Psi2 = _operator(Psi2, "Psi2")
    return _build(A, A, Psi1, Psi2, Flavor.ANALYSIS, rank_tol)


def from_synthesis(A, D1, D2, rank_tol=DEFAULT_RANK_TOL):
    """Components are ``D1 s1`` and ``D2 s2`` with sparse coefficients."""
    A = _operator(A, "A")
    D1 = _operator(D1, "D1")
    D2 = _operator(D2, "D2")
    for D, name in ((D1, "D1"), (D2, "D2")):
        if D.shape[0] != A.shape[1]:
            raise DimensionMismatch(f"{name} has {D.shape[0]} rows, A has {A.shape[1]} columns")
        _require_full_row_rank(D, name, rank_tol)
    return _build(A @ D1, A @ D2, _identity(D1.shape[1], D1), _identity(D2.shape[1], D2),
                  Flavor.SYNTHESIS, rank_tol, D1=D1, D2=D2)


def from_hybrid(A, D1, Psi2, rank_tol=DEFAULT_RANK_TOL):
    """First component synthesis-sparse in `D1`, second analysis-sparse under `Psi2`."""
    A = _operator(A, "A")
    D1 = _operator(D1, "D1")
    Psi2 = _operator(Psi2, "Psi2")
    if D1.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"D1 has {D1.shape[0]} rows, A has {A.shape[1]} columns")
    _require_full_row_rank(D1, "D1", rank_tol)
    return _build(A @ D1, A, _identity(D1.shape[1], D1), Psi2, Flavor.HYBRID, rank_tol, D1=D1)


def from_blocks(A1, Psi1, A2, Psi2, rank_tol=DEFAULT_RANK_TOL):
    """General template with separate measurement matrices per block.

    Reported as the analysis flavor; with ``A1 is A2`` it is exactly
    :func:`from_analysis`.
    """
    A1, A2 = _operator(A1, "A1"), _operator(A2, "A2")
    Psi1, Psi2 = _operator(Psi1, "Psi1"), _operator(Psi2, "Psi2")
    return _build(A1, A2, Psi1, Psi2, Flavor.ANALYSIS, rank_tol)


class SplitSolution(NamedTuple):
    part1: np.ndarray
    part2: np.ndarray
    signal1: np.ndarray
    signal2: np.ndarray


def split_solution(p, x_stacked):
    """Cut a stacked solution into its two blocks.

    ``part1``/``part2`` are the unknowns of each block (coefficients for
    synthesis blocks); ``signal1``/``signal2`` are the corresponding
    signal-domain components.
    """
    x = as_vector(x_stacked, "x_stacked")
    d1, d2 = p.component_dims
    if x.size != d1 + d2:
        raise DimensionMismatch(f"expected length {d1 + d2}, got {x.size}")
    x1, x2 = x[:d1], x[d1:]
    sig1 = p.D1 @ x1 if p.D1 is not None else x1
    sig2 = p.D2 @ x2 if p.D2 is not None else x2
    return SplitSolution(x1, x2, sig1, sig2)
