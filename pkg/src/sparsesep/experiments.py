"""Synthetic instances and end-to-end sweeps that test the recovery bound.

A sweep draws instances, certifies them (pure arithmetic on the coherence
profile), solves them, and compares the empirical error with the certified
bound.  Reports go to CSV and JSON.

Dictionary families
-------------------
``gaussian``
    A: m x d Gaussian with unit columns.  Analysis operators: n x d Gaussian.
    Synthesis dictionaries: d x n Gaussian with unit columns.
``partial_dct``
    A: m randomly chosen rows of the orthonormal d x d DCT with randomly
    flipped column signs, rescaled to unit columns.  Analysis operators:
    identity and DCT (needs n == d).  Synthesis dictionaries: cosine frame
    (the DCT basis when n == d) and ``[I | Gaussian]``.
``identity_plus_dct``
    As ``partial_dct`` but with ``A = I`` (needs m == d).

Hybrid problems pair the first synthesis dictionary with the first
analysis operator, so the two components stay morphologically distinct.

Analysis-sparse signals are drawn as ``x = pinv(Psi) t`` for a k-sparse
``t``, so ``Psi x = t`` when ``Psi`` is square.  A tall ``n x d`` operator
only admits exactly k-sparse ``Psi x`` for ``k >= n - d + 1``; there ``x`` is
drawn from the null space of ``Psi`` restricted to a random cosupport.
Below that, ``Psi x`` is the projection of ``t`` onto range(Psi), which is
only approximately sparse, and the bound is evaluated with the actual
``sigma_k(Psi x)``.
"""

import csv
import enum
import io
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np
import scipy.linalg

from . import guarantees
from .errors import SeparationError, UnsatisfiableSparsity
from .matrix_core import pseudoinverse
from .operators import dct_matrix, overcomplete_dct, unit_columns
from .problems import Flavor, from_analysis, from_hybrid, from_synthesis, split_solution
from .solver import SolveOptions, check_lemmas, solve_separation
from .sparsity import shift_set, sigma_k, supp_k

__all__ = [
    "DictionaryFamily",
    "ExperimentSpec",
    "Instance",
    "TrialReport",
    "SweepResult",
    "generate_instance",
    "run_trial",
    "run_sweep",
    "CSV_COLUMNS",
    "BOUND_SLACK",
]

BOUND_SLACK = 1e-6

CSV_COLUMNS = [
    "trial", "flavor", "k1", "k2", "mu_hat_1", "mu_hat_2", "mu_hat_m", "threshold",
    "satisfied", "C0", "C1", "eps", "sigma_k1", "sigma_k2", "predicted_bound",
    "empirical_error", "ratio", "converged", "runtime_ms",
]


class DictionaryFamily(str, enum.Enum):
    GAUSSIAN = "gaussian"
    PARTIAL_DCT = "partial_dct"
    IDENTITY_PLUS_DCT = "identity_plus_dct"


@dataclass(frozen=True)
class ExperimentSpec:
    m: int
    d: int
    n: int
    flavor: Flavor = Flavor.ANALYSIS
    k1: int = 1
    k2: int = 1
    snr_db: float = None
    trials: int = 10
    seed: int = 0
    dictionary_family: DictionaryFamily = DictionaryFamily.GAUSSIAN
    # relative size of a dense tail added to the sparse coefficients
    tail: float = 0.0
    # eps = eps_inflation * ||e||_2
    eps_inflation: float = 1.0
    solve_options: SolveOptions = field(default_factory=SolveOptions)

    def __post_init__(self):
        object.__setattr__(self, "flavor", Flavor(self.flavor))
        object.__setattr__(self, "dictionary_family", DictionaryFamily(self.dictionary_family))
        if min(self.m, self.d, self.n) < 1:
            raise ValueError("dimensions must be positive")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.m > self.d:
            raise ValueError("need m <= d")
        if self.n < self.d:
            raise ValueError("need n >= d")
        fam = self.dictionary_family
        if fam is DictionaryFamily.IDENTITY_PLUS_DCT and self.m != self.d:
            raise ValueError("identity_plus_dct needs m == d")
        if fam is not DictionaryFamily.GAUSSIAN and self.flavor is Flavor.ANALYSIS and self.n != self.d:
            raise ValueError(f"{fam.value} analysis operators are square: need n == d")
        if self.eps_inflation < 1:
            raise ValueError("eps_inflation must be >= 1")

    @classmethod
    def from_dict(cls, obj):
        obj = dict(obj)
        if "solve_options" in obj:
            obj["solve_options"] = SolveOptions(**obj["solve_options"])
        return cls(**obj)

    def to_dict(self):
        d = asdict(self)
        d["flavor"] = self.flavor.value
        d["dictionary_family"] = self.dictionary_family.value
        return d


class Instance(NamedTuple):
    problem: object
    x_true: np.ndarray
    y: np.ndarray
    epsilon: float


def _measurement(spec, rng):
    m, d = spec.m, spec.d
    fam = spec.dictionary_family
    if fam is DictionaryFamily.GAUSSIAN:
        return unit_columns(rng.standard_normal((m, d)))
    if fam is DictionaryFamily.PARTIAL_DCT:
        rows = np.sort(rng.choice(d, size=m, replace=False))
        signs = rng.choice([-1.0, 1.0], size=d)
        return unit_columns(dct_matrix(d)[rows] * signs)
    return np.eye(d)


def _analysis_ops(spec, rng):
    if spec.dictionary_family is DictionaryFamily.GAUSSIAN:
        scale = 1.0 / np.sqrt(spec.n)
        return (scale * rng.standard_normal((spec.n, spec.d)),
                scale * rng.standard_normal((spec.n, spec.d)))
    return np.eye(spec.d), dct_matrix(spec.d)


def _synthesis_dicts(spec, rng):
    d, n = spec.d, spec.n
    if spec.dictionary_family is DictionaryFamily.GAUSSIAN:
        return (unit_columns(rng.standard_normal((d, n))),
                unit_columns(rng.standard_normal((d, n))))
    extra = unit_columns(rng.standard_normal((d, n - d))) if n > d else np.zeros((d, 0))
    return overcomplete_dct(d, n), np.hstack([np.eye(d), extra])


def _sparse_vector(dim, k, tail, rng):
    if k > dim:
        raise UnsatisfiableSparsity(f"cannot place {k} nonzeros in dimension {dim}")
    t = np.zeros(dim)
    support = rng.choice(dim, size=k, replace=False)
    t[support] = rng.standard_normal(k)
    if tail > 0:
        t += tail * rng.standard_normal(dim) / np.sqrt(dim)
    return t


def _cosparse_vector(Psi, k, tail, rng):
    """x with ``Psi x`` zero off a random k-set (needs k >= n - d + 1)."""
    n, d = Psi.shape
    cosupport = rng.choice(n, size=n - k, replace=False)
    basis = scipy.linalg.null_space(Psi[cosupport])
    x = basis @ rng.standard_normal(basis.shape[1])
    x *= np.sqrt(k) / np.linalg.norm(Psi @ x)
    if tail > 0:
        x += tail * rng.standard_normal(d) / np.sqrt(d)
    return x


def _is_identity(M):
    return M.shape[0] == M.shape[1] and np.array_equal(M, np.eye(M.shape[0]))


def generate_instance(spec, trial_index):
    """Draw one problem instance; deterministic in ``(spec.seed, trial_index)``.

    Returns
    -------
    Instance
        ``(problem, x_true, y, epsilon)`` where `x_true` stacks the unknowns
        of both blocks (coefficients for synthesis blocks).
    """
    rng = np.random.default_rng([spec.seed, trial_index])
    A = _measurement(spec, rng)
    flavor = spec.flavor
    if flavor is Flavor.ANALYSIS:
        Psi1, Psi2 = _analysis_ops(spec, rng)
        problem = from_analysis(A, Psi1, Psi2)
    elif flavor is Flavor.SYNTHESIS:
        D1, D2 = _synthesis_dicts(spec, rng)
        problem = from_synthesis(A, D1, D2)
    else:
        D1, _ = _synthesis_dicts(spec, rng)
        Psi2, _ = _analysis_ops(spec, rng)
        problem = from_hybrid(A, D1, Psi2)

    blocks = []
    for Psi, k in ((problem.Psi1, spec.k1), (problem.Psi2, spec.k2)):
        n, d = Psi.shape
        if _is_identity(Psi):
            blocks.append(_sparse_vector(n, k, spec.tail, rng))
        elif n > d and k >= n - d + 1:
            blocks.append(_cosparse_vector(Psi, k, spec.tail, rng))
        else:
            blocks.append(pseudoinverse(Psi) @ _sparse_vector(n, k, spec.tail, rng))
    x_true = np.concatenate(blocks)
    clean = problem.stacked_A @ x_true
    if spec.snr_db is None:
        e = np.zeros_like(clean)
    else:
        power = np.vdot(clean, clean).real / clean.size
        sigma = np.sqrt(power / 10 ** (spec.snr_db / 10))
        e = sigma * rng.standard_normal(clean.size)
    epsilon = spec.eps_inflation * float(np.linalg.norm(e))
    return Instance(problem, x_true, clean + e, epsilon)


@dataclass
class TrialReport:
    trial: int
    flavor: str
    certificate: guarantees.RecoveryCertificate
    profile: dict
    empirical_error: float
    bound_satisfied: bool
    solver_converged: bool
    runtime_ms: float
    tube_slack: float = None
    cone_slack: float = None
    error: str = None

    @property
    def ratio(self):
        c = self.certificate
        if c is None or not c.has_bound or c.predicted_bound == 0:
            return None
        return self.empirical_error / c.predicted_bound

    def csv_row(self, timing=True):
        c = self.certificate
        p = self.profile or {}
        return {
            "trial": self.trial,
            "flavor": self.flavor,
            "k1": c.k1 if c else None,
            "k2": c.k2 if c else None,
            "mu_hat_1": p.get("mu_hat_1"),
            "mu_hat_2": p.get("mu_hat_2"),
            "mu_hat_m": p.get("mu_hat_m"),
            "threshold": c.threshold_split if c else None,
            "satisfied": c.satisfied if c else None,
            "C0": c.C0 if c else None,
            "C1": c.C1 if c else None,
            "eps": c.epsilon if c else None,
            "sigma_k1": c.sigma_k1 if c else None,
            "sigma_k2": c.sigma_k2 if c else None,
            "predicted_bound": c.predicted_bound if c else None,
            "empirical_error": self.empirical_error,
            "ratio": self.ratio,
            "converged": self.solver_converged,
            "runtime_ms": round(self.runtime_ms, 3) if timing else 0,
        }

    def to_dict(self):
        d = {k: v for k, v in asdict(self).items() if k != "certificate"}
        d["certificate"] = self.certificate.to_dict() if self.certificate else None
        d["ratio"] = self.ratio
        return d


def run_trial(spec, trial_index, solve_options=None):
    """certify -> solve -> lemma diagnostics -> report, for one instance."""
    t0 = time.perf_counter()
    opts = solve_options or spec.solve_options
    inst = generate_instance(spec, trial_index)
    p = inst.problem
    prof = p.profile()
    x1, x2 = split_solution(p, inst.x_true)[:2]
    s1 = sigma_k(p.Psi1 @ x1, spec.k1)
    s2 = sigma_k(p.Psi2 @ x2, spec.k2)
    cert = guarantees.certify(prof, p.sigma_min_psi, spec.k1, spec.k2, inst.epsilon, s1, s2)
    result, _ = solve_separation(p, inst.y, inst.epsilon, opts, x_reference=inst.x_true)
    err = float(np.linalg.norm(result.diagnostics["h"]))
    # S = S1 U (n1 + S2) inside the stacked coefficient space
    n1, n = p.Psi1.shape[0], p.stacked_Psi.shape[0]
    S = shift_set(supp_k(p.Psi1 @ x1, spec.k1), 0, n).union(
        shift_set(supp_k(p.Psi2 @ x2, spec.k2), n1, n))
    lem = check_lemmas(result, inst.x_true, p.stacked_Psi, p.stacked_A,
                       spec.k1 + spec.k2, inst.epsilon, opts.feasibility_tol, support=S)
    bound_ok = None
    if cert.has_bound:
        bound_ok = err <= cert.predicted_bound + BOUND_SLACK
    return TrialReport(
        trial=trial_index, flavor=spec.flavor.value, certificate=cert,
        profile=prof.to_dict(), empirical_error=err, bound_satisfied=bound_ok,
        solver_converged=result.converged,
        runtime_ms=1e3 * (time.perf_counter() - t0),
        tube_slack=lem.tube_slack, cone_slack=lem.cone_slack,
    )


def _safe_trial(spec, i):
    try:
        return run_trial(spec, i)
    except SeparationError as exc:
        return TrialReport(trial=i, flavor=spec.flavor.value, certificate=None, profile=None,
                           empirical_error=float("nan"), bound_satisfied=None,
                           solver_converged=False, runtime_ms=0.0,
                           error=f"{type(exc).__name__}: {exc}")


def _thread_count():
    env = os.environ.get("SSEP_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass
class SweepResult:
    spec: ExperimentSpec
    reports: list

    def aggregate(self):
        ok = [r for r in self.reports if r.error is None]
        certified = [r for r in ok if r.certificate.has_bound]
        checked = [r for r in certified if r.solver_converged]
        ratios = [r.ratio for r in checked if r.ratio is not None]
        return {
            "trials": len(self.reports),
            "failed": len(self.reports) - len(ok),
            "certified": len(certified),
            "converged": sum(r.solver_converged for r in ok),
            "bound_violations": sum(not r.bound_satisfied for r in checked),
            "exact_recovery_rate": (sum(r.empirical_error <= 1e-4 for r in ok) / len(ok)) if ok else None,
            "mean_error": float(np.mean([r.empirical_error for r in ok])) if ok else None,
            "mean_ratio": float(np.mean(ratios)) if ratios else None,
            "max_ratio": float(np.max(ratios)) if ratios else None,
        }

    def to_csv(self, timing=True):
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for r in self.reports:
            writer.writerow({k: ("" if v is None else v) for k, v in r.csv_row(timing).items()})
        return buf.getvalue()

    def to_json(self):
        return json.dumps({"spec": self.spec.to_dict(), "aggregate": self.aggregate(),
                           "trials": [r.to_dict() for r in self.reports]}, indent=2, default=str)

    def write(self, out_dir, timing=True):
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "sweep.csv").write_text(self.to_csv(timing))
        (out / "sweep.json").write_text(self.to_json())
        return out


def run_sweep(spec, threads=None):
    """Run every trial of `spec`; per-trial errors are recorded, not raised.

    Trials run on a thread pool (``SSEP_THREADS`` caps its size); reports are
    returned in trial order regardless of completion order.
    """
    threads = threads or _thread_count()
    if threads == 1:
        reports = [_safe_trial(spec, i) for i in range(spec.trials)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(lambda i: _safe_trial(spec, i), range(spec.trials)))
    return SweepResult(spec, reports)
