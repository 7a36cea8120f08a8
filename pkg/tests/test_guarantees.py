import itertools
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from oracles import threshold_single_bf, threshold_split_bf
from sparsesep.coherence import CoherenceProfile
from sparsesep.errors import GHatNonpositive, NegativeCoherence, ThresholdViolated
from sparsesep.guarantees import (
    certify,
    error_constants_single,
    error_constants_split,
    f_cross,
    g_hat,
    gersgorin_bounds,
    max_admissible,
    threshold_single,
    threshold_split,
)

SQRT3 = math.sqrt(3)


def make_profile(m1, m2, mm, omega_min=1.0, omega_max=1.0, mu=None):
    w2 = omega_min**2
    raw = (m1 * w2, m2 * w2, mm * w2)
    return CoherenceProfile(m1, m2, mm, max(m1, m2, mm), *raw,
                            mu if mu is not None else max(raw), omega_min, omega_max)


def test_threshold_single_examples():
    assert threshold_single(1 / 3) == pytest.approx(2.0)
    assert max_admissible(threshold_single(1 / 3)) == 1
    assert threshold_single(1.0) == 1.0
    assert max_admissible(1.0) == 0
    assert threshold_single(0.0) == math.inf
    with pytest.raises(NegativeCoherence):
        threshold_single(-0.1)


def test_threshold_split_worked_example():
    p = make_profile(0.1, 0.1, 0.1)
    # first term 2.2 / (0.3 + 0.1 sqrt 2), evaluated by hand: 4.983900...
    first = 2.2 / (0.1 + 0.2 + 0.1 * math.sqrt(2))
    assert first == pytest.approx(4.9839002325, abs=1e-9)
    assert threshold_split(p) == pytest.approx(5.5, abs=1e-12)
    assert max_admissible(threshold_split(p)) == 5


def test_threshold_split_orthogonal_and_symmetric():
    assert threshold_split(make_profile(0, 0, 0)) == math.inf
    p = make_profile(0.3, 0.05, 0.2)
    assert threshold_split(p) == threshold_split(p.swapped())


def test_gersgorin_examples():
    b = gersgorin_bounds(1.0, 1.0, 0.2, 3)
    assert (b.theta_min, b.theta_max) == pytest.approx((0.6, 1.4))
    b = gersgorin_bounds(0.5, 2.0, 0.9, 1)
    assert (b.theta_min, b.theta_max) == (0.25, 4.0)


def test_f_cross_examples():
    assert f_cross(1, 1, 0.4, 0.7, 0.3) == pytest.approx(0.3)
    assert f_cross(2, 0, 0.4, 0.7, 0.3) == pytest.approx(0.4)
    assert f_cross(3, 2, 0.1, 0.3, 0.2) == pytest.approx(0.78990, abs=1e-5)


def test_g_hat_examples():
    assert g_hat(7, 1.3, 0, 0, 0, 0)[0] == pytest.approx(1.69)
    val, _ = g_hat(2, 1.0, 0.0, 0.2, 0.1, 0.25)
    assert val == pytest.approx(1 - math.sqrt(0.05) - 0.5, abs=1e-12)
    assert val == pytest.approx(0.27639, abs=1e-5)


def test_error_constants_examples():
    C0, C1 = error_constants_single(1, 1, 1, 0.0, 1)
    assert (C0, C1) == pytest.approx((2 * SQRT3, 1.0))
    with pytest.raises(ThresholdViolated):
        error_constants_single(1, 1, 1, 1 / 3, 2)
    C0, C1 = error_constants_split(1, 1, 0, 1, 1)
    assert (C0, C1) == pytest.approx((2 * SQRT3, 1.0))
    with pytest.raises(GHatNonpositive):
        error_constants_split(1, 1, 0.1, 2, 0.0)


def test_single_constants_monotone_in_mu_hat():
    for k in (1, 2, 4):
        grid = np.linspace(0, 1 / (2 * k - 1), 40, endpoint=False)
        vals = np.array([error_constants_single(0.7, 0.9, 1.3, m, k) for m in grid])
        assert np.all(np.diff(vals[:, 0]) >= 0)
        assert np.all(np.diff(vals[:, 1]) >= 0)


@pytest.mark.parametrize("k, mu_hat", [(1, 0.0), (1, 0.3), (3, 0.0), (5, 0.0)])
def test_split_reduces_to_single(k, mu_hat):
    # matched settings: one block (mu_2 = mu_m = 0) and either k = 1 or mu = 0
    omega_min, omega_max, smin = 0.8, 1.1, 0.6
    mu = mu_hat * omega_min**2
    gk, _ = g_hat(k, omega_min, 0.0, 0.0, 0.0, mu)
    split = error_constants_split(smin, omega_max**2 + f_cross(k, 0, 0, 0, 0), mu, k, gk)
    single = error_constants_single(smin, omega_min, omega_max, mu_hat, k)
    assert split == pytest.approx(single, rel=1e-10)


def test_certify_examples():
    orth = make_profile(0.0, 0.0, 0.05)
    c = certify(orth, 1.0, 2, 3)
    assert c.satisfied and c.predicted_bound == 0.0
    p = make_profile(0.1, 0.1, 0.1)
    assert certify(p, 1.0, 3, 2).satisfied
    c = certify(p, 1.0, 3, 3)
    assert not c.satisfied and not c.has_bound and c.C0 is None


def test_certify_picks_smaller_route():
    p = make_profile(0.0, 0.02, 0.1)
    c = certify(p, 1.0, 1, 1, epsilon=0.1, sigma_k1=0.01)
    gk, _ = g_hat(2, 1.0, 0.0, 0.02, 0.1, p.mu)
    split = error_constants_split(1.0, 1 + f_cross(1, 1, 0, 0.02, 0.1), p.mu, 2, gk)
    single = error_constants_single(1.0, 1.0, 1.0, p.mu, 2)
    bounds = [C0 * 0.1 + C1 * 0.01 for C0, C1 in (split, single)]
    assert c.predicted_bound == pytest.approx(min(bounds), rel=1e-12)
    assert c.to_dict()["route"] in ("split", "single")


def test_certificate_dict_encodes_inf():
    c = certify(make_profile(0, 0, 0), 1.0, 1, 1)
    assert c.to_dict()["threshold_split"] == "inf"


mus = st.floats(0, 1)


@given(mus, mus, mus)
def test_threshold_split_matches_scalar_oracle(m1, m2, mm):
    assume(max(m1, m2, mm) > 1e-6)
    assert threshold_split(make_profile(m1, m2, mm)) == pytest.approx(threshold_split_bf(m1, m2, mm), rel=1e-12)


@given(st.floats(1e-6, 1))
def test_threshold_single_matches_scalar_oracle(m):
    assert threshold_single(m) == pytest.approx(threshold_single_bf(m), rel=1e-12)


@given(st.integers(1, 12), st.floats(0.3, 2), mus, mus, mus, st.floats(0, 0.5))
def test_g_hat_lower_bounds_integer_splits(k, omega, m1, m2, mm, extra):
    mu = max(m1, m2, mm) + extra
    gk, _ = g_hat(k, omega, m1, m2, mm, mu)
    lo, hi = sorted([m1, m2])
    integer_min = min(omega**2 - f_cross(k1, k - k1, lo, hi, mm) - mu * k for k1 in range(k + 1))
    assert integer_min >= gk - 1e-12


@given(st.integers(2, 8), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_gersgorin_sandwich(m, k, seed):
    g = np.random.default_rng(seed)
    p = k + 3
    M = g.standard_normal((m, p)) * g.uniform(0.5, 2, p)
    norms = np.linalg.norm(M, axis=0)
    G = M.T @ M
    mu = np.abs(G - np.diag(np.diag(G))).max()
    b = gersgorin_bounds(norms.min(), norms.max(), mu, k)
    for S in itertools.islice(itertools.combinations(range(p), k), 5):
        v = np.zeros(p)
        v[list(S)] = g.standard_normal(k)
        e = np.linalg.norm(M @ v) ** 2
        nv = v @ v
        assert b.theta_min * nv - 1e-10 <= e <= b.theta_max * nv + 1e-10
