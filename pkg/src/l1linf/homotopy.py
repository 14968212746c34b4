"""Homotopy driver for min ||x||_1 subject to ||A x - b||_inf <= delta.

The bound is treated as a homotopy parameter: starting from
delta_0 = ||b||_inf (where x = 0 is optimal) it is driven down to the
requested target.  Each iteration first refreshes the dual certificate
(``dual_update``), then takes the maximal primal step (``primal_update``),
producing one breakpoint of the piecewise-linear primal solution path; the
dual path is piecewise constant between breakpoints.  Multiplier-system
solutions are passed across subproblems as warm starts.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import oracle
from .asm import (ACTIVE_TOL, OPT_TOL, SUPPORT_TOL, AsmError,
                  UnboundedDirectionError)
from .dual_update import DualContext, dual_update
from .encodings import improvement_system_dual, improvement_system_primal
from .linalg import IndexSet, as_matrix, as_vector
from .primal_update import PrimalContext, primal_update

PAIR_TOL = 1e-8        # optimal-pair certification tolerance
INIT_TIE_RTOL = 1e-12  # ties for the initial active rows |b_i| = ||b||_inf
T_MIN = 1e-12          # a primal step at or below this is a degenerate step
QUERY_TOL = 1e-9       # breakpoint matching in eval_path


class HomotopyError(RuntimeError):
    pass


@dataclass
class ProblemInstance:
    A: np.ndarray
    b: np.ndarray
    delta: float

    def __post_init__(self):
        self.A = as_matrix(self.A, "A")
        self.b = as_vector(self.b, "b")
        self.delta = float(self.delta)
        if self.A.shape[0] != self.b.size:
            raise ValueError("A and b have incompatible shapes")
        if self.A.shape[0] < 1 or self.A.shape[1] < 1:
            raise ValueError("A must have at least one row and one column")
        if not self.delta >= 0.0:
            raise ValueError("delta must be nonnegative")

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]


@dataclass
class IndexSets:
    J_P: IndexSet
    I_P: IndexSet
    J_D: IndexSet
    I_D: IndexSet
    primal_signs: np.ndarray    # aligned with J_P
    residual_signs: np.ndarray  # aligned with I_P
    dual_signs: np.ndarray      # aligned with I_D


@dataclass
class PathBreakpoint:
    k: int
    delta_k: float
    x: np.ndarray
    y: np.ndarray
    sets: IndexSets
    t_step: float


@dataclass
class SolutionPath:
    breakpoints: list[PathBreakpoint]
    terminated: str                      # "target-reached" | "failure"
    failure_reason: str | None = None
    dual_iterations: int = 0
    primal_iterations: int = 0
    retries: int = 0
    timing: dict = field(default_factory=dict)

    @property
    def x_final(self) -> np.ndarray:
        return self.breakpoints[-1].x

    @property
    def objective(self) -> float:
        return float(np.sum(np.abs(self.x_final)))


def sign_vector(v: np.ndarray, tol: float = SUPPORT_TOL) -> np.ndarray:
    out = np.zeros_like(v)
    out[v > tol] = 1.0
    out[v < -tol] = -1.0
    return out


def check_optimal_pair(inst: ProblemInstance, x, y, delta: float,
                       tol: float = PAIR_TOL) -> bool:
    """Subgradient certification of an optimal pair:
    -A^T y in Sign(x) and A x - b in delta * Sign(y), within tol."""
    x = as_vector(x, "x")
    y = as_vector(y, "y")
    g = inst.A.T @ y
    for j in range(inst.n):
        if abs(x[j]) > tol:
            if abs(g[j] + np.sign(x[j])) > tol:
                return False
        elif abs(g[j]) > 1.0 + tol:
            return False
    r = inst.A @ x - inst.b
    rtol = tol * (1.0 + delta)
    for i in range(inst.m):
        if abs(y[i]) > tol:
            if abs(r[i] - delta * np.sign(y[i])) > rtol:
                return False
        elif abs(r[i]) > delta + rtol:
            return False
    return True


def duality_gap(inst: ProblemInstance, x, y, delta: float) -> float:
    primal = float(np.sum(np.abs(x)))
    dual = float(-inst.b @ y - delta * np.sum(np.abs(y)))
    return abs(primal - dual)


def _build_sets(inst: ProblemInstance, x, y, delta: float) -> IndexSets:
    resid = inst.A @ x - inst.b
    scale = ACTIVE_TOL * (1.0 + delta + np.max(np.abs(inst.b)))
    i_p = IndexSet.from_mask(np.abs(np.abs(resid) - delta) <= scale)
    i_d = IndexSet.from_mask(np.abs(y) > SUPPORT_TOL)
    i_p = i_p.union(i_d)
    j_p = IndexSet.from_mask(np.abs(x) > SUPPORT_TOL)
    col = inst.A.T @ y
    j_d = IndexSet.from_mask(np.abs(np.abs(col) - 1.0) <= 2 * ACTIVE_TOL).union(j_p)
    return IndexSets(
        J_P=j_p, I_P=i_p, J_D=j_d, I_D=i_d,
        primal_signs=np.sign(x[j_p.array]),
        residual_signs=sign_vector(resid[i_p.array], tol=0.0),
        dual_signs=np.sign(y[i_d.array]),
    )


def _full_residual_signs(inst: ProblemInstance, sets: IndexSets) -> np.ndarray:
    full = np.zeros(inst.m)
    full[sets.I_P.array] = sets.residual_signs
    return full


def solve_path(inst: ProblemInstance, use_warm_starts: bool = True,
               max_iters: int | None = None, trace=None,
               capture=None) -> SolutionPath:
    """Compute the full breakpoint path from ||b||_inf down to inst.delta.

    ``trace`` receives one dict per homotopy iteration; ``capture``, when
    given, receives ("dual", DualContext) / ("primal", PrimalContext) before
    each subproblem solve (used by cross-validation harnesses).
    """
    m, n = inst.m, inst.n
    delta0 = float(np.max(np.abs(inst.b)))
    x = np.zeros(n)
    y = np.zeros(m)

    if inst.delta >= delta0 * (1.0 - INIT_TIE_RTOL):
        sets = _build_sets(inst, x, y, inst.delta)
        bp = PathBreakpoint(0, inst.delta, x, y, sets, 0.0)
        return SolutionPath([bp], "target-reached")

    sets = _build_sets(inst, x, y, delta0)
    # initial active rows: all i with |b_i| = ||b||_inf up to a relative tie
    i_p = IndexSet.from_mask(np.abs(inst.b) >= delta0 * (1.0 - INIT_TIE_RTOL))
    sets = IndexSets(sets.J_P, i_p, sets.J_D, sets.I_D, sets.primal_signs,
                     sign_vector(-inst.b[i_p.array], tol=0.0), sets.dual_signs)
    path = SolutionPath([PathBreakpoint(0, delta0, x.copy(), y.copy(), sets, 0.0)],
                        "failure")
    path.timing = {"dual_s": 0.0, "primal_s": 0.0, "refresh_s": 0.0}
    delta_k = delta0
    warm_e: np.ndarray | None = None
    if max_iters is None:
        max_iters = 20 * (m + n)

    for k in range(max_iters):
        i_p = path.breakpoints[-1].sets.I_P
        j_p = path.breakpoints[-1].sets.J_P
        full_signs = _full_residual_signs(inst, path.breakpoints[-1].sets)
        dual_ctx = DualContext(inst.A, inst.b, x, i_p, j_p, full_signs,
                               y_start=y,
                               warm_direction=warm_e if use_warm_starts else None)
        if capture is not None:
            capture("dual", dual_ctx)
        tick = time.perf_counter()
        try:
            dual_res = dual_update(dual_ctx)
        except UnboundedDirectionError:
            # unbounded certificate face: the bound cannot shrink any further,
            # so the target lies below the least feasible value of ||Ax-b||_inf
            # (possible whenever A has more rows than columns)
            path.failure_reason = (
                f"target delta={inst.delta:g} is below the minimal feasible "
                f"bound; path stopped at delta={delta_k:g}")
            return path
        except (AsmError, ValueError) as exc:
            path.failure_reason = f"dual update failed at iteration {k}: {exc}"
            return path
        path.timing["dual_s"] += time.perf_counter() - tick
        path.dual_iterations += dual_res.iterations
        y_next = dual_res.y
        col = inst.A.T @ y_next
        i_d = IndexSet.from_mask(np.abs(y_next) > SUPPORT_TOL)
        j_d = IndexSet.from_mask(np.abs(np.abs(col) - 1.0) <= 2 * ACTIVE_TOL).union(j_p)

        primal_ctx = PrimalContext(
            inst.A, inst.b, y_next, delta_k, inst.delta, x, i_p, j_p, i_d, j_d,
            full_signs,
            warm_direction=dual_res.d_hat if use_warm_starts else None)
        if capture is not None:
            capture("primal", primal_ctx)
        tick = time.perf_counter()
        try:
            primal_res = primal_update(primal_ctx)
        except (AsmError, ValueError) as exc:
            path.failure_reason = f"primal update failed at iteration {k}: {exc}"
            return path
        path.timing["primal_s"] += time.perf_counter() - tick
        path.primal_iterations += primal_res.iterations

        if primal_res.t <= T_MIN and not primal_res.reached_target:
            # theory rules out a zero step at an exact dual optimum; retry
            # once, cold and with a tighter multiplier tolerance
            path.retries += 1
            try:
                dual_res = dual_update(
                    DualContext(inst.A, inst.b, x, i_p, j_p, full_signs,
                                y_start=y, warm_direction=None),
                    opt_tol=OPT_TOL / 100.0)
                path.dual_iterations += dual_res.iterations
                y_next = dual_res.y
                col = inst.A.T @ y_next
                i_d = IndexSet.from_mask(np.abs(y_next) > SUPPORT_TOL)
                j_d = IndexSet.from_mask(
                    np.abs(np.abs(col) - 1.0) <= 2 * ACTIVE_TOL).union(j_p)
                primal_res = primal_update(
                    PrimalContext(inst.A, inst.b, y_next, delta_k, inst.delta,
                                  x, i_p, j_p, i_d, j_d, full_signs,
                                  warm_direction=None),
                    opt_tol=OPT_TOL / 100.0)
                path.primal_iterations += primal_res.iterations
            except (AsmError, ValueError) as exc:
                path.failure_reason = f"degenerate-step retry failed at iteration {k}: {exc}"
                return path
            if primal_res.t <= T_MIN and not primal_res.reached_target:
                path.failure_reason = (
                    f"degenerate step at iteration {k}: t={primal_res.t:.3e} "
                    f"with delta_k={delta_k:.6e}")
                return path

        t = float(primal_res.t)
        x = primal_res.x
        delta_next = inst.delta if primal_res.reached_target else delta_k - t
        if delta_next < inst.delta + T_MIN * (1.0 + inst.delta):
            delta_next = inst.delta
        y = y_next
        tick = time.perf_counter()
        sets = _build_sets(inst, x, y, delta_next)
        path.timing["refresh_s"] += time.perf_counter() - tick
        path.breakpoints.append(
            PathBreakpoint(k + 1, delta_next, x.copy(), y.copy(), sets, t))
        if trace is not None:
            trace({"k": k + 1, "delta": delta_next, "t": t,
                   "nnz_x": len(sets.J_P), "nnz_y": len(sets.I_D),
                   "active_rows": len(sets.I_P), "active_cols": len(sets.J_D),
                   "dual_iters": dual_res.iterations,
                   "primal_iters": primal_res.iterations})
        if delta_next <= inst.delta:
            path.terminated = "target-reached"
            return path
        delta_k = delta_next
        warm_e = primal_res.e_hat
    path.failure_reason = f"homotopy iteration cap {max_iters} exceeded"
    return path


def eval_path(path: SolutionPath, delta_query: float) -> tuple[np.ndarray, np.ndarray]:
    """Solution at an intermediate bound: x interpolates linearly between the
    bracketing breakpoints, y is the certificate of the covering segment."""
    bps = path.breakpoints
    q = float(delta_query)
    hi = bps[0].delta_k
    lo = bps[-1].delta_k
    tol = QUERY_TOL * (1.0 + abs(q))
    if q > hi + tol or q < lo - tol:
        raise ValueError(f"query {q} outside path range [{lo}, {hi}]")
    q = min(max(q, lo), hi)
    for bp in bps:
        if abs(bp.delta_k - q) <= tol:
            return bp.x.copy(), bp.y.copy()
    for upper, lower in zip(bps, bps[1:]):
        if lower.delta_k < q < upper.delta_k:
            w = (upper.delta_k - q) / (upper.delta_k - lower.delta_k)
            return upper.x + w * (lower.x - upper.x), lower.y.copy()
    raise ValueError(f"query {q} not bracketed by breakpoints")


def check_alternatives(inst: ProblemInstance, x_hat, y_hat,
                       delta_hat: float) -> tuple[bool, bool]:
    """Feasibility of the two mutually exclusive improvement-direction
    systems at an optimal pair: (dual improvement possible, primal
    improvement possible).  Exactly one holds for 0 < delta_hat < ||b||_inf."""
    x_hat = as_vector(x_hat, "x_hat")
    y_hat = as_vector(y_hat, "y_hat")
    if not check_optimal_pair(inst, x_hat, y_hat, delta_hat):
        raise ValueError("(x_hat, y_hat) is not an optimal pair at delta_hat")
    sets = _build_sets(inst, x_hat, y_hat, delta_hat)
    full_signs = _full_residual_signs(inst, sets)
    sys1 = improvement_system_dual(inst.A, full_signs, y_hat,
                                   sets.I_P, sets.J_P, sets.J_D, sets.I_D)
    sys2 = improvement_system_primal(inst.A, full_signs, y_hat,
                                     sets.I_P, sets.J_P, sets.J_D, sets.I_D)
    return (oracle.feasibility(sys1, strict_ub_row=0), oracle.feasibility(sys2))
