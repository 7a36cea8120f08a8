"""Closed-form recovery thresholds and error constants.

Everything here is scalar arithmetic on a :class:`CoherenceProfile`; nothing
solves an optimization problem, so :func:`certify` is cheap enough to run as a
pre-flight check.

Two routes lead to an error bound for the concatenated problem:

* the *split* route uses the block-aware lower bound ``g_hat(k)`` and is
  available whenever ``g_hat(k1 + k2) > 0``;
* the *single* route treats ``[B1 B2]`` as one dictionary with coherence
  ``mu / omega_min**2`` and is available whenever
  ``1 - mu_hat (2k - 1) > 0``.

A certificate reports the smaller of the bounds that apply.
"""

import math
from dataclasses import asdict, dataclass

from .errors import GHatNonpositive, NegativeCoherence, ThresholdViolated

__all__ = [
    "GersgorinBounds",
    "RecoveryCertificate",
    "threshold_single",
    "threshold_split",
    "max_admissible",
    "gersgorin_bounds",
    "f_cross",
    "g_hat",
    "error_constants_single",
    "error_constants_split",
    "certify",
]

INF = math.inf


@dataclass(frozen=True)
class GersgorinBounds:
    theta_min: float
    theta_max: float


@dataclass(frozen=True)
class RecoveryCertificate:
    threshold_split: float
    threshold_single: float
    k1: int
    k2: int
    satisfied: bool
    C0: float = None
    C1: float = None
    predicted_bound: float = None
    sigma_min_psi: float = None
    epsilon: float = 0.0
    sigma_k1: float = 0.0
    sigma_k2: float = 0.0
    g_hat: float = None
    route: str = None

    @property
    def has_bound(self):
        return self.predicted_bound is not None

    def to_dict(self):
        d = asdict(self)
        for key, val in d.items():
            if isinstance(val, float) and math.isinf(val):
                d[key] = "inf"
        return d


def _check_nonneg(**values):
    for name, v in values.items():
        if v < 0:
            raise NegativeCoherence(f"{name} = {v} is negative")


def threshold_single(mu_hat):
    """``(1 + 1/mu_hat) / 2``; sparsity levels strictly below it are admissible.

    Returns ``inf`` for ``mu_hat == 0``.
    """
    _check_nonneg(mu_hat=mu_hat)
    if mu_hat == 0:
        return INF
    return 0.5 * (1.0 + 1.0 / mu_hat)


def threshold_split(p):
    """Admissibility threshold for ``k1 + k2`` given a coherence profile.

    The profile is relabelled so that ``mu_hat_1 <= mu_hat_2`` before
    evaluation, which makes the result symmetric in the two components.
    """
    _check_nonneg(mu_hat_1=p.mu_hat_1, mu_hat_2=p.mu_hat_2, mu_hat_m=p.mu_hat_m)
    mu2 = max(p.mu_hat_1, p.mu_hat_2)
    mum = p.mu_hat_m
    mmax = max(p.mu_hat_1, p.mu_hat_2, mum)
    if mmax == 0:
        return INF
    first = 2.0 * (1.0 + mu2) / (mu2 + 2.0 * mmax + math.sqrt(mu2**2 + mum**2))
    second = (1.0 + mmax) / (2.0 * mmax)
    return max(first, second)


def max_admissible(threshold):
    """Largest integer strictly below `threshold` (``None`` if unbounded)."""
    if math.isinf(threshold):
        return None
    return math.ceil(threshold) - 1


def gersgorin_bounds(omega_min, omega_max, mu, k):
    """Eigenvalue sandwich for Gram submatrices on k columns."""
    if k < 1:
        raise ValueError("k must be >= 1")
    spread = mu * (k - 1)
    return GersgorinBounds(omega_min**2 - spread, omega_max**2 + spread)


def f_cross(k1, k2, mu_1, mu_2, mu_m):
    return max(mu_1 * (k1 - 1), mu_2 * (k2 - 1)) + mu_m * math.sqrt(k1 * k2)


def g_hat(k, omega_min, mu_1, mu_2, mu_m, mu):
    """Continuous lower bound on ``min_{k1+k2=k} g(k1, k2)``.

    Returns
    -------
    value : float
    k2_star : float
        Minimizing (continuous) size of the second block, after relabelling
        so that ``mu_1 <= mu_2``.
    """
    mu_2 = max(mu_1, mu_2)
    r = math.hypot(mu_2, mu_m)
    value = omega_min**2 - 0.5 * (mu_2 * (k - 2) + k * r) - mu * k
    k2_star = 0.5 * k * (1.0 + mu_2 / r) if r > 0 else 0.5 * k
    return value, k2_star


def error_constants_single(sigma_min_psi, omega_min, omega_max, mu_hat, k):
    """(C0, C1) for one dictionary with normalized coherence `mu_hat`.

    Raises
    ------
    ThresholdViolated
        If ``1 - mu_hat (2k - 1) <= 0``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    margin = 1.0 - mu_hat * (2 * k - 1)
    if margin <= 0:
        raise ThresholdViolated(f"1 - mu_hat(2k-1) = {margin:.3g} <= 0 for k={k}")
    ratio = (omega_max**2 / omega_min**2) * (1.0 + mu_hat * (k - 1))
    C0 = 2.0 * math.sqrt(3.0) / (sigma_min_psi * omega_min) * math.sqrt(ratio) / margin
    C1 = (2.0 * mu_hat * math.sqrt(3.0 * k) / margin + 1.0 / math.sqrt(k)) / sigma_min_psi
    return C0, C1


def error_constants_split(sigma_min_psi, theta_max, mu, k, g_hat_k):
    """(C0, C1) for the block-aware route.

    C0 keeps the ``sqrt(theta_max)`` factor from the noise term.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if g_hat_k <= 0:
        raise GHatNonpositive(f"g_hat({k}) = {g_hat_k:.3g} <= 0")
    C0 = 2.0 * math.sqrt(3.0) * math.sqrt(theta_max) / (sigma_min_psi * g_hat_k)
    C1 = (2.0 * mu * math.sqrt(3.0 * k) / g_hat_k + 1.0 / math.sqrt(k)) / sigma_min_psi
    return C0, C1


def certify(p, sigma_min_psi, k1, k2, epsilon=0.0, sigma_k1=0.0, sigma_k2=0.0):
    """Evaluate the recovery guarantee for sparsity levels (k1, k2).

    An unsatisfied threshold is a valid outcome, not an error: the returned
    certificate has ``satisfied=False`` and no constants.
    """
    k = k1 + k2
    thr = threshold_split(p)
    mu_hat_stacked = p.mu / p.omega_min**2
    thr_single = threshold_single(mu_hat_stacked)
    base = dict(
        threshold_split=thr, threshold_single=thr_single, k1=k1, k2=k2,
        sigma_min_psi=sigma_min_psi, epsilon=epsilon,
        sigma_k1=sigma_k1, sigma_k2=sigma_k2,
    )
    satisfied = k < thr
    if not satisfied or k < 1:
        return RecoveryCertificate(satisfied=satisfied, **base)

    tail = sigma_k1 + sigma_k2
    gk, _ = g_hat(k, p.omega_min, p.mu_1, p.mu_2, p.mu_m, p.mu)
    candidates = []
    if gk > 0:
        theta_max = p.omega_max**2 + f_cross(k1, k2, p.mu_1, p.mu_2, p.mu_m)
        C0, C1 = error_constants_split(sigma_min_psi, theta_max, p.mu, k, gk)
        candidates.append((C0 * epsilon + C1 * tail, C0, C1, "split"))
    if 1.0 - mu_hat_stacked * (2 * k - 1) > 0:
        C0, C1 = error_constants_single(sigma_min_psi, p.omega_min, p.omega_max, mu_hat_stacked, k)
        candidates.append((C0 * epsilon + C1 * tail, C0, C1, "single"))
    if not candidates:
        return RecoveryCertificate(satisfied=True, g_hat=gk, **base)
    bound, C0, C1, route = min(candidates, key=lambda c: c[0])
    return RecoveryCertificate(
        satisfied=True, C0=C0, C1=C1, predicted_bound=bound, g_hat=gk, route=route, **base
    )
