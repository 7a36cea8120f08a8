"""Image analysis operators and a few dictionary constructors.

Images of shape ``(h, w)`` are vectorized in row-major (C) order, i.e.
``x = img.ravel()``.
"""

import numpy as np
import scipy.fft
import scipy.sparse as sp

__all__ = [
    "finite_difference_operator",
    "dct_matrix",
    "dct2_operator",
    "overcomplete_dct",
    "unit_columns",
]


def _periodic_diff(n):
    """(n, n) forward difference with wrap-around: (Dv)_i = v_{i+1} - v_i."""
    return sp.csr_array(sp.eye(n, k=1, format="csr") - sp.eye(n, format="csr")
                        + sp.eye(n, k=-(n - 1), format="csr"))


def finite_difference_operator(h, w, tau=1e-3, sparse=False):
    """Regularized 2-D finite-difference analysis operator.

    Stacks horizontal periodic differences, vertical periodic differences and
    ``tau * I``, giving a ``(3hw, hw)`` matrix.  The identity block makes the
    operator full column rank (constant images are otherwise in its kernel),
    with smallest singular value at least `tau`.

    Parameters
    ----------
    h, w : int
        Image height and width, both at least 2.
    tau : float
        Weight of the identity rows.
    sparse : bool
        Return a :class:`scipy.sparse.csr_array` instead of a dense array.
    """
    if h < 2 or w < 2:
        raise ValueError("image must be at least 2x2")
    if tau <= 0:
        raise ValueError("tau must be positive")
    horiz = sp.kron(sp.eye(h), _periodic_diff(w))
    vert = sp.kron(_periodic_diff(h), sp.eye(w))
    op = sp.vstack([horiz, vert, tau * sp.eye(h * w)], format="csr")
    return op if sparse else op.toarray()


def dct_matrix(n):
    """Orthonormal DCT-II matrix ``C`` with ``C @ v == scipy.fft.dct(v, norm='ortho')``."""
    return scipy.fft.dct(np.eye(n), norm="ortho", axis=0)


def dct2_operator(h, w):
    """Orthonormal 2-D DCT-II acting on row-major vectorized ``(h, w)`` images."""
    if h < 2 or w < 2:
        raise ValueError("image must be at least 2x2")
    return np.kron(dct_matrix(h), dct_matrix(w))


def unit_columns(M):
    return M / np.linalg.norm(M, axis=0)


def overcomplete_dct(d, n):
    """``d x n`` frame of sampled cosines at `n` equispaced frequencies, unit columns."""
    i = np.arange(d)[:, None] + 0.5
    k = np.arange(n)[None, :]
    return unit_columns(np.cos(np.pi * i * k / n))
