import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sparsesep.errors import KTooLarge, OutOfRange
from sparsesep.sparsity import IndexSet, project_support, shift_set, sigma_k, supp_k


def test_supp_k_examples():
    assert supp_k(np.array([0.5, -2, 1]), 2).indices == (1, 2)
    assert supp_k(np.array([0.5, -2, 1]), 0).indices == ()
    assert supp_k(np.ones(3), 2).indices == (0, 1)


def test_supp_k_range():
    with pytest.raises(KTooLarge):
        supp_k(np.ones(3), 4)


def test_sigma_k_brute_force():
    x = np.array([3.0, -1, 2])
    best = min(np.abs(x).sum() - np.abs(x[list(S)]).sum() for S in itertools.combinations(range(3), 1))
    assert sigma_k(x, 1) == best == 3.0
    assert sigma_k(x, 3) == 0.0
    assert sigma_k(np.array([0.0, 4, 0]), 1) == 0.0


def test_project_support_examples():
    x = np.array([1.0, 2, 3])
    np.testing.assert_array_equal(project_support(x, IndexSet((0, 2), 3)), [1, 0, 3])
    np.testing.assert_array_equal(project_support(x, IndexSet((), 3)), [0, 0, 0])


def test_shift_set_examples():
    assert shift_set(IndexSet((0, 2), 4), 4, 8).indices == (4, 6)
    S = IndexSet((1, 3), 5)
    assert shift_set(S, 0, 5) == S
    with pytest.raises(OutOfRange):
        shift_set(IndexSet((3,), 4), 5, 6)


def test_index_set_validation_and_one_based():
    with pytest.raises(ValueError):
        IndexSet((2, 1), 3)
    with pytest.raises(OutOfRange):
        IndexSet((3,), 3)
    S = IndexSet((0, 4), 5)
    assert S.one_based() == [1, 5]
    assert S.complement().indices == (1, 2, 3)


vectors = arrays(np.float64, st.integers(1, 12), elements=st.floats(-100, 100, allow_nan=False))


@given(vectors, st.data())
def test_sigma_k_partition_identity(x, data):
    k = data.draw(st.integers(0, x.size))
    kept = np.abs(project_support(x, supp_k(x, k))).sum()
    assert kept + sigma_k(x, k) == pytest.approx(np.abs(x).sum(), abs=1e-12 * max(1, np.abs(x).sum()))


@given(vectors)
def test_sigma_k_monotone(x):
    vals = [sigma_k(x, k) for k in range(x.size + 1)]
    assert vals[0] == pytest.approx(np.abs(x).sum())
    assert all(a >= b for a, b in zip(vals, vals[1:]))


@given(vectors, st.integers(-20, 20), st.sampled_from([1.0, -1.0]), st.data())
def test_supp_k_scale_invariant(x, e, sign, data):
    # powers of two scale exactly, so magnitude order and ties are preserved
    k = data.draw(st.integers(0, x.size))
    assert supp_k(sign * 2.0**e * x, k).indices == supp_k(x, k).indices


@given(vectors, st.data())
def test_project_support_partition(x, data):
    idx = data.draw(st.sets(st.integers(0, x.size - 1)))
    S = IndexSet(tuple(sorted(idx)), x.size)
    np.testing.assert_array_equal(project_support(x, S) + project_support(x, S.complement()), x)
