"""Constrained analysis-l1 minimization.

Solves::

    minimize ||Psi x||_1  subject to  ||y - A x||_2 <= eps

with a primal-dual hybrid gradient (Chambolle-Pock) iteration on the
stacked operator ``K = [Psi; beta A]``.  The l1 term and the ball indicator
enter through their proximal maps, so neither is smoothed.  Every iterate
that gets reported is first pushed back into the constraint set along
``pinv(A) r``, which makes the returned point feasible to rounding error.

:func:`oracle_solve` solves the same program with a conic interior-point
solver and exists to cross-check the main path on small instances.
"""

import logging
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch, Infeasible, NotConverged
from .matrix_core import as_vector
from .problems import split_solution
from .sparsity import project_support, supp_k

__all__ = [
    "SolveOptions",
    "SolveResult",
    "LemmaDiagnostics",
    "solve_p_star",
    "solve_separation",
    "oracle_solve",
    "check_lemmas",
    "ORACLE_MAX_DIM",
]

log = logging.getLogger(__name__)

ORACLE_MAX_DIM = 64


@dataclass(frozen=True)
class SolveOptions:
    max_iterations: int = 20000
    objective_tol: float = 1e-9
    feasibility_tol: float = 1e-7
    window: int = 50
    power_iterations: int = 50
    residual_tol: float = 1e-8
    polish: bool = True
    strict: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.objective_tol <= 0 or self.feasibility_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass
class SolveResult:
    x_star: np.ndarray
    objective: float
    residual_norm: float
    iterations_used: int
    converged: bool
    history: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)
    runtime_s: float = 0.0

    def summary(self):
        return {
            "objective": self.objective,
            "residual_norm": self.residual_norm,
            "iterations_used": self.iterations_used,
            "converged": self.converged,
            "runtime_s": self.runtime_s,
            **{k: v for k, v in self.diagnostics.items() if np.isscalar(v)},
        }


def _dense(M):
    return M.toarray() if sp.issparse(M) else np.asarray(M)


def _adjoint(M):
    return M.conj().T


def _check_inputs(A, Psi, y, epsilon):
    y = as_vector(y, "y")
    if A.shape[1] != Psi.shape[1]:
        raise DimensionMismatch(f"A has {A.shape[1]} columns but Psi has {Psi.shape[1]}")
    if A.shape[0] != y.size:
        raise DimensionMismatch(f"A has {A.shape[0]} rows but y has length {y.size}")
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    return y


def _work_dtype(*arrays):
    cplx = any(np.iscomplexobj(a.data if sp.issparse(a) else a) for a in arrays)
    return np.complex128 if cplx else np.float64


def _op_norm(M, MH, n_iter, rng, dtype):
    v = rng.standard_normal(M.shape[1]).astype(dtype)
    v /= np.linalg.norm(v)
    s = 0.0
    for _ in range(n_iter):
        w = MH @ (M @ v)
        s = np.linalg.norm(w)
        if s == 0:
            return 0.0
        v = w / s
    return float(np.sqrt(s))


class _RangeOfA:
    """Thin SVD of A for the range test and feasibility restoration."""

    def __init__(self, A):
        U, s, Vh = np.linalg.svd(_dense(A), full_matrices=False)
        keep = s > (s[0] if s.size else 0.0) * max(A.shape) * np.finfo(float).eps
        self.U = U[:, keep]
        self.s = s[keep]
        self.V = Vh[keep].conj().T

    def split(self, r):
        par = self.U @ (self.U.conj().T @ r)
        return par, r - par

    def pinv_apply(self, r):
        return self.V @ ((self.U.conj().T @ r) / self.s)


def _restore(x, A, y, epsilon, rng_of_a):
    """Move `x` along pinv(A) r until ||y - A x|| <= eps (when possible)."""
    r = y - A @ x
    nr = np.linalg.norm(r)
    if nr <= epsilon:
        return x, nr
    par, perp = rng_of_a.split(r)
    npar = np.linalg.norm(par)
    if npar == 0:
        return x, nr
    keep = np.sqrt(max(epsilon**2 - np.linalg.norm(perp) ** 2, 0.0)) / npar
    x = x + (1.0 - keep) * rng_of_a.pinv_apply(par)
    return x, float(np.linalg.norm(y - A @ x))


def _l1(v):
    return float(np.abs(v).sum())


def _project_unit_disc(p):
    mag = np.abs(p)
    return p / np.maximum(mag, 1.0)


def _polish_support(x, A, Psi, y, epsilon, feas_tol):
    """Noiseless refinement: re-solve on the detected cosupport.

    Solves ``A z = y, Psi_{S^c} z = 0`` in the least-squares sense for the
    support S of ``Psi x``.  The candidate is only used by the caller when it
    is feasible and does not increase the objective.
    """
    u = Psi @ x
    mag = np.abs(u)
    if mag.max(initial=0.0) == 0:
        return None
    off = mag <= 1e-6 * mag.max()
    Ad, Pd = _dense(A), _dense(Psi)
    M = np.vstack([Ad, Pd[off]])
    rhs = np.concatenate([y, np.zeros(int(off.sum()), dtype=y.dtype)])
    z, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    if np.linalg.norm(y - Ad @ z) > epsilon + feas_tol:
        return None
    return z


def solve_p_star(A, Psi, y, epsilon, opts=None, x_reference=None):
    """Minimize ``||Psi x||_1`` subject to ``||y - A x||_2 <= epsilon``.

    Parameters
    ----------
    A : ndarray or sparse matrix, shape (m, p)
    Psi : ndarray or sparse matrix, shape (n, p)
    y : array_like, shape (m,)
    epsilon : float
        Noise radius; 0 enforces ``A x = y``.
    opts : SolveOptions, optional
    x_reference : array_like, optional
        Ground truth; when given, ``diagnostics["h"]`` holds ``x* - x_reference``.

    Returns
    -------
    SolveResult
        ``converged`` is False when the iteration budget ran out; the best
        feasible iterate found is still returned.

    Raises
    ------
    Infeasible
        If no point satisfies the constraint (y too far from range(A)).
    NotConverged
        Only with ``opts.strict``.
    """
    opts = opts or SolveOptions()
    t0 = time.perf_counter()
    y = _check_inputs(A, Psi, y, epsilon)
    dtype = _work_dtype(A, Psi, y)
    y = y.astype(dtype)
    p_dim = A.shape[1]
    AH, PsiH = _adjoint(A), _adjoint(Psi)
    feas_tol = opts.feasibility_tol

    rng_of_a = _RangeOfA(A)
    _, perp = rng_of_a.split(y)
    gap = float(np.linalg.norm(perp))
    if gap > epsilon + feas_tol:
        raise Infeasible(f"distance from y to range(A) is {gap:.3e} > eps = {epsilon:.3e}")

    x = np.zeros(p_dim, dtype=dtype)
    if np.linalg.norm(y) <= epsilon:
        return _finish(x, A, Psi, y, 0, True, [0.0], t0, x_reference, {"trivial": True})

    # The program is positively homogeneous in (y, eps); iterate at unit scale
    # so the absolute residual tolerance means the same thing for any data.
    y_scale = float(np.linalg.norm(y))
    y_orig, eps_orig = y, epsilon
    y, epsilon = y / y_scale, epsilon / y_scale
    feas_tol = feas_tol / max(y_scale, 1.0)

    rng = np.random.default_rng(opts.seed)
    norm_psi = _op_norm(Psi, PsiH, opts.power_iterations, rng, dtype)
    norm_a = _op_norm(A, AH, opts.power_iterations, rng, dtype)
    beta = norm_psi / norm_a if norm_a > 0 else 1.0
    n_psi = Psi.shape[0]
    by, beps = beta * y, beta * epsilon

    def K(v):
        return np.concatenate([Psi @ v, beta * (A @ v)])

    def KH(d):
        return PsiH @ d[:n_psi] + beta * (AH @ d[n_psi:])

    class _Stacked:
        shape = (n_psi + A.shape[0], p_dim)
        __matmul__ = staticmethod(K)

    class _StackedH:
        __matmul__ = staticmethod(KH)

    L = 1.01 * _op_norm(_Stacked(), _StackedH(), opts.power_iterations, rng, dtype)
    eta = 0.99 / L
    omega = 1.0  # primal weight: tau = eta / omega, sigma = eta * omega

    def prox_dual(d, sigma):
        u = _project_unit_disc(d[:n_psi])
        qt = d[n_psi:]
        z = qt / sigma - by
        nz = np.linalg.norm(z)
        if nz > beps:
            z = z * (beps / nz)
        return np.concatenate([u, qt - sigma * (by + z)])

    def step(x, d, Kx, tau, sigma):
        x_new = x - tau * KH(d)
        Kx_new = K(x_new)
        d_new = prox_dual(d + sigma * (2 * Kx_new - Kx), sigma)
        return x_new, d_new, Kx_new

    def fp_residual(x, d, Kx, tau, sigma):
        x1, d1, _ = step(x, d, Kx, tau, sigma)
        dx, dd = x - x1, d - d1
        return float(np.sqrt(omega * np.vdot(dx, dx).real + np.vdot(dd, dd).real / omega))

    d = np.zeros(n_psi + A.shape[0], dtype=dtype)
    Kx = K(x)
    x_sum, d_sum, n_avg = np.zeros_like(x), np.zeros_like(d), 0
    x_restart, d_restart = x, d
    r_restart = None
    r_prev_cand = np.inf
    best_x, best_obj = None, np.inf
    history = []
    prev_obj = None
    converged = False
    n_restarts = 0
    it = 0
    r_cand = np.inf
    for it in range(1, opts.max_iterations + 1):
        tau, sigma = eta / omega, eta * omega
        x, d, Kx = step(x, d, Kx, tau, sigma)
        x_sum += x
        d_sum += d
        n_avg += 1

        if it % opts.window and it != opts.max_iterations:
            continue
        xa, da = x_sum / n_avg, d_sum / n_avg
        Kxa = K(xa)
        r_cur = fp_residual(x, d, Kx, tau, sigma)
        r_avg = fp_residual(xa, da, Kxa, tau, sigma)
        if r_avg < r_cur:
            cand_x, cand_d, cand_Kx, r_cand = xa, da, Kxa, r_avg
        else:
            cand_x, cand_d, cand_Kx, r_cand = x, d, Kx, r_cur
        if r_restart is None:
            r_restart = r_cand
        if r_cand <= 0.2 * r_restart or (r_cand <= 0.8 * r_restart and r_cand > r_prev_cand):
            # restart from the candidate and re-balance the primal weight
            dx = np.linalg.norm(cand_x - x_restart)
            dd = np.linalg.norm(cand_d - d_restart)
            if dx > 1e-12 and dd > 1e-12:
                omega = float(np.exp(0.5 * np.log(dd / dx) + 0.5 * np.log(omega)))
            x, d, Kx = cand_x, cand_d, cand_Kx
            x_restart, d_restart = x, d
            x_sum[:], d_sum[:], n_avg = 0, 0, 0
            r_restart = r_cand
            r_prev_cand = np.inf
            n_restarts += 1
        else:
            r_prev_cand = r_cand

        xf, res = _restore(cand_x, A, y, epsilon, rng_of_a)
        obj = _l1(Psi @ xf)
        if res <= epsilon + feas_tol and obj < best_obj:
            best_x, best_obj = xf, obj
        history.append(best_obj)
        scale = max(1.0, abs(obj))
        stagnant = prev_obj is not None and abs(obj - prev_obj) <= opts.objective_tol * scale
        small = r_cand <= opts.residual_tol * max(1.0, np.linalg.norm(cand_x))
        prev_obj = obj
        if stagnant and small:
            converged = True
            break

    if best_x is None:
        best_x, _ = _restore(x, A, y, epsilon, rng_of_a)
        best_obj = _l1(Psi @ best_x)
    best_x, best_obj = best_x * y_scale, best_obj * y_scale
    history = [h * y_scale for h in history]
    y, epsilon, feas_tol = y_orig, eps_orig, opts.feasibility_tol
    info = {"beta": beta, "op_norm": L, "primal_weight": omega, "restarts": n_restarts,
            "fixed_point_residual": float(r_cand), "polished": False}
    if opts.polish and epsilon == 0:
        z = _polish_support(best_x, A, Psi, y, epsilon, feas_tol)
        if z is not None:
            obj_z = _l1(Psi @ z)
            if obj_z <= best_obj * (1 + 1e-9) + 1e-12:
                best_x, best_obj = z.astype(dtype), obj_z
                info["polished"] = True
    result = _finish(best_x, A, Psi, y, it, converged, history, t0, x_reference, info)
    if not converged:
        log.warning("solve_p_star: no convergence after %d iterations", it)
        if opts.strict:
            raise NotConverged(result)
    return result


def _finish(x, A, Psi, y, it, converged, history, t0, x_reference, info):
    diagnostics = dict(info)
    if x_reference is not None:
        diagnostics["h"] = x - as_vector(x_reference)
    return SolveResult(
        x_star=x,
        objective=_l1(Psi @ x),
        residual_norm=float(np.linalg.norm(y - A @ x)),
        iterations_used=it,
        converged=converged,
        history=history,
        diagnostics=diagnostics,
        runtime_s=time.perf_counter() - t0,
    )


def solve_separation(p, y, epsilon, opts=None, x_reference=None):
    """Solve a :class:`SeparationProblem` and split the result.

    Returns
    -------
    result : SolveResult
    parts : SplitSolution
    """
    result = solve_p_star(p.stacked_A, p.stacked_Psi, y, epsilon, opts, x_reference)
    parts = split_solution(p, result.x_star)
    result.diagnostics["objective_1"] = _l1(p.Psi1 @ parts.part1)
    result.diagnostics["objective_2"] = _l1(p.Psi2 @ parts.part2)
    return result, parts


def oracle_solve(A, Psi, y, epsilon, tol=1e-10):
    """Independent reference solution through a second-order cone program.

    Intended for desk-scale problems (at most ``ORACLE_MAX_DIM`` unknowns).
    """
    import cvxpy as cp

    t0 = time.perf_counter()
    A, Psi = _dense(A), _dense(Psi)
    y = _check_inputs(A, Psi, y, epsilon)
    p_dim = A.shape[1]
    if p_dim > ORACLE_MAX_DIM:
        raise ValueError(f"oracle is limited to {ORACLE_MAX_DIM} unknowns, got {p_dim}")
    cplx = _work_dtype(A, Psi, y) == np.complex128
    x = cp.Variable(p_dim, complex=cplx)
    cons = [A @ x == y] if epsilon == 0 else [cp.norm(y - A @ x, 2) <= epsilon]
    prob = cp.Problem(cp.Minimize(cp.norm1(Psi @ x)), cons)
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=tol, tol_gap_rel=tol, tol_feas=tol,
               max_iter=500)
    if prob.status in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE):
        raise Infeasible("oracle reports an infeasible constraint set")
    ok = prob.status == cp.OPTIMAL
    xs = np.asarray(x.value).astype(np.complex128 if cplx else np.float64)
    return SolveResult(
        x_star=xs,
        objective=_l1(Psi @ xs),
        residual_norm=float(np.linalg.norm(y - A @ xs)),
        iterations_used=int(prob.solver_stats.num_iters or 0),
        converged=ok,
        diagnostics={"status": prob.status},
        runtime_s=time.perf_counter() - t0,
    )


@dataclass(frozen=True)
class LemmaDiagnostics:
    h_norm: float
    tube_lhs: float
    tube_rhs: float
    tube_slack: float
    cone_lhs: float
    cone_rhs: float
    cone_slack: float


def check_lemmas(result, x_true, Psi, A, k, epsilon, feasibility_tol=1e-7, support=None):
    """Evaluate the tube and cone inequalities for ``h = x* - x_true``.

    Tube:  ``||A h||_2 <= 2 eps + 2 feasibility_tol``.
    Cone:  ``||Psi_{S^c} h||_1 <= ||Psi_S h||_1 + 2 ||Psi_{S^c} x_true||_1``
    with ``S = supp_k(Psi x_true)``, or `support` when given (the cone
    inequality holds for any S once ``||Psi x*||_1 <= ||Psi x_true||_1``).
    Slacks are ``rhs - lhs``; a negative slack is a violation, up to the
    solver's objective accuracy for the cone.
    """
    x_true = as_vector(x_true)
    h = result.x_star - x_true
    tube_lhs = float(np.linalg.norm(A @ h))
    tube_rhs = 2 * epsilon + 2 * feasibility_tol
    u_true = Psi @ x_true
    S = supp_k(u_true, k) if support is None else support
    Sc = S.complement()
    u_h = Psi @ h
    cone_lhs = _l1(project_support(u_h, Sc))
    cone_rhs = _l1(project_support(u_h, S)) + 2 * _l1(project_support(u_true, Sc))
    return LemmaDiagnostics(
        h_norm=float(np.linalg.norm(h)),
        tube_lhs=tube_lhs, tube_rhs=tube_rhs, tube_slack=tube_rhs - tube_lhs,
        cone_lhs=cone_lhs, cone_rhs=cone_rhs, cone_slack=cone_rhs - cone_lhs,
    )
