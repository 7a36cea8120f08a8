"""Supports, best k-term approximation error and support projections."""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, KTooLarge, OutOfRange
from .matrix_core import as_vector

__all__ = ["IndexSet", "supp_k", "sigma_k", "project_support", "shift_set"]


@dataclass(frozen=True)
class IndexSet:
    """Strictly increasing 0-based indices into ``range(ambient_dim)``."""

    indices: tuple
    ambient_dim: int

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("indices must be strictly increasing")
        if idx and (idx[0] < 0 or idx[-1] >= self.ambient_dim):
            raise OutOfRange(f"indices must lie in [0, {self.ambient_dim})")
        object.__setattr__(self, "indices", idx)

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, i):
        return i in self.indices

    def complement(self):
        keep = np.ones(self.ambient_dim, dtype=bool)
        keep[list(self.indices)] = False
        return IndexSet(tuple(np.flatnonzero(keep)), self.ambient_dim)

    def union(self, other):
        if other.ambient_dim != self.ambient_dim:
            raise DimensionMismatch("ambient dimensions differ")
        return IndexSet(tuple(sorted(set(self.indices) | set(other.indices))), self.ambient_dim)

    def mask(self):
        m = np.zeros(self.ambient_dim, dtype=bool)
        m[list(self.indices)] = True
        return m

    def one_based(self):
        return [i + 1 for i in self.indices]


def _check_k(x, k):
    if k < 0 or k > x.size:
        raise KTooLarge(f"k={k} outside [0, {x.size}]")


def supp_k(x, k):
    """Indices of the `k` largest-magnitude entries of `x`.

    Ties in magnitude go to the lower index.
    """
    x = as_vector(x)
    _check_k(x, k)
    order = np.argsort(-np.abs(x), kind="stable")
    return IndexSet(tuple(sorted(order[:k].tolist())), x.size)


def sigma_k(x, k):
    """l1 error of the best k-term approximation of `x`."""
    x = as_vector(x)
    _check_k(x, k)
    mags = np.sort(np.abs(x))
    return float(mags[: x.size - k].sum())


def project_support(x, S):
    x = as_vector(x)
    if S.ambient_dim != x.size:
        raise DimensionMismatch(f"index set lives in dimension {S.ambient_dim}, vector has {x.size}")
    out = np.zeros_like(x)
    idx = list(S.indices)
    out[idx] = x[idx]
    return out


def shift_set(S, n, ambient_dim):
    """The set ``{n + p : p in S}`` viewed inside ``range(ambient_dim)``."""
    shifted = tuple(i + n for i in S.indices)
    if shifted and (shifted[0] < 0 or shifted[-1] >= ambient_dim):
        raise OutOfRange(f"shifted indices {shifted} do not fit in [0, {ambient_dim})")
    return IndexSet(shifted, ambient_dim)
