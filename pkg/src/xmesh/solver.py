"""Time-step driver: quasi-Newton iterations alternating with projection."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .assembly import (Assembler, SparseSystem, StepState, apply_dirichlet, dirichlet_values,
                       subdivided_midedge_rule)
from .front import FrontState, node_mobility, project_on_C, relax_in_C
from .physics import RegularizationParams

log = logging.getLogger(__name__)


class LinearSolverError(RuntimeError):
    def __init__(self, message, row=None):
        self.row = row
        super().__init__(message)


@dataclass(frozen=True)
class SolverConfig:
    theta: float = 0.5
    delta: float = 8.0
    epsilon: float = 1e-5
    a_tol: float = 5e-9
    max_iterations: int = 50
    relax_keep: float = 0.9
    relax_pull: float = 0.1
    # -1 applies T' = T - A^{-1} r (Newton); +1 is the literal "T + Delta" reading
    update_sign: int = -1
    target_metric: str = "travel"
    relay_mode: str = "relay"
    # quadrature of the regularized tangent: mid-edge rule on m*m sub-triangles
    tangent_subdivision: int = 1

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError("theta must lie in [0, 1]")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if self.update_sign not in (-1, 1):
            raise ValueError("update_sign must be -1 or +1")
        if int(self.tangent_subdivision) < 1:
            raise ValueError("tangent_subdivision must be >= 1")


@dataclass
class StepReport:
    iterations: int = 0
    err_history: list = field(default_factory=list)
    residual_history: list = field(default_factory=list)
    converged: bool = False
    front_node_count: int = 0
    final_residual: float = float("nan")

    @property
    def residual_reduction(self):
        """Final over first free-node residual norm (max norm)."""
        if not self.residual_history or self.residual_history[0] == 0:
            return 0.0
        return self.final_residual / self.residual_history[0]


@dataclass
class StefanProblem:
    """Everything that stays fixed over a run: mesh, material, loading."""

    topology: object
    mesh: object
    props: object
    bcs: tuple = ()
    sinks: tuple = ()
    source: object = 0.0

    def assembler(self, config):
        return Assembler(self.topology, self.mesh, self.props, config.theta, config.a_tol,
                         self.sinks, self.source)

    def dirichlet(self, t):
        return dirichlet_values(self.bcs, self.mesh.reference_coords, t)

    def dirichlet_nodes(self):
        if not self.bcs:
            return np.empty(0, dtype=np.int64)
        return np.unique(np.concatenate([np.asarray(bc.nodes, dtype=np.int64) for bc in self.bcs]))

    def mobility(self):
        return node_mobility(self.topology, self.dirichlet_nodes())


def solve_linear(system, rhs=None):
    """Direct sparse LU (SuperLU, partial pivoting) solve of ``A x = r``."""
    if isinstance(system, SparseSystem):
        A, r = system.matrix, system.rhs
    else:
        A, r = system, rhs
    A = sp.csc_matrix(A)
    r = np.asarray(r, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("matrix must be square")
    if n == 0:
        return np.zeros(0)
    try:
        lu = splu(A, permc_spec="COLAMD", diag_pivot_thresh=1.0)
    except RuntimeError as exc:
        row = _first_empty_row(A)
        raise LinearSolverError(f"singular matrix ({exc}); pivot row {row}", row) from None
    d = np.abs(lu.U.diagonal())
    scale = d.max() if len(d) else 1.0
    if scale == 0 or d.min() <= 1e-14 * scale:
        k = int(np.argmin(d))
        row = int(np.flatnonzero(lu.perm_r == k)[0])
        raise LinearSolverError(f"numerically singular matrix; pivot row {row}", row)
    x = lu.solve(r)
    res = r - A @ x
    if np.linalg.norm(res) > 1e-10 * np.linalg.norm(r):
        x = x + lu.solve(res)
    return x


def _first_empty_row(A):
    counts = np.diff(sp.csr_matrix(A).indptr)
    empty = np.flatnonzero(counts == 0)
    return int(empty[0]) if len(empty) else None


def sign_update_correction(T, delta, sign=-1):
    """Apply a correction ``delta`` solving ``A delta = r``; default is Newton's minus sign."""
    return np.asarray(T, dtype=float) + sign * np.asarray(delta, dtype=float)


def correction_norm(topology, mesh, Jc, delta):
    """sqrt(integral of Delta^2 J dX0 / reference area) for the P1 field Delta."""
    de = delta[topology.triangles]
    quad = (np.sum(de * de, axis=1) + np.sum(de, axis=1) ** 2) / 12.0
    num = np.sum(np.abs(Jc) * mesh.reference_areas * quad)
    return math.sqrt(max(num, 0.0) / np.sum(mesh.reference_areas))


def timestep_sqrt(beta, t_n):
    """Step keeping the front advance constant for a sqrt(t) front law."""
    if not t_n > 0 or not beta > 0:
        raise ValueError("timestep_sqrt needs t_n > 0 and beta > 0; use timestep_implicit at t = 0")
    return math.sqrt(beta * t_n)


def timestep_implicit(dt_first, t_n):
    """Solution of dt = sqrt(dt_first * (t_n + dt))."""
    if not dt_first > 0 or t_n < 0:
        raise ValueError("timestep_implicit needs dt_first > 0 and t_n >= 0")
    return dt_first * (1.0 + math.sqrt(1.0 + 4.0 * t_n / dt_first)) / 2.0


def run_time_step(problem, state_n, front_n, dt, config=SolverConfig(), assembler=None,
                  mobility=None, fixed_point=False):
    """Advance one step; returns ``(state_np1, front_np1, StepReport)``.

    Non-convergence within ``config.max_iterations`` is reported through
    ``StepReport.converged`` rather than raised.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    asm = assembler or problem.assembler(config)
    mob = problem.mobility() if mobility is None else mobility
    topo, mesh, props = problem.topology, problem.mesh, problem.props
    T0 = props.T0
    reg = RegularizationParams(config.delta)
    t1 = state_n.time + dt

    temps, coords = relax_in_C(state_n.temps, state_n.coords, mesh.reference_coords, front_n,
                               config.relax_keep, config.relax_pull)
    dir_nodes, dir_vals = problem.dirichlet(t1)
    temps[dir_nodes] = dir_vals
    free = np.setdiff1d(np.arange(topo.node_count), dir_nodes)
    front = front_n
    report = StepReport()
    laws = "fixed" if fixed_point else "reg"
    res_laws = "fixed" if fixed_point else "sharp"
    rule = None if config.tangent_subdivision == 1 or fixed_point else subdivided_midedge_rule(
        config.tangent_subdivision)

    for k in range(config.max_iterations):
        current = StepState(coords, temps, t1)
        r = asm.residual(state_n, current, laws=res_laws, reg=reg)
        A = asm.tangent(state_n, current, reg=reg, laws=laws, rule=rule)
        report.residual_history.append(float(np.max(np.abs(r[free]))) if len(free) else 0.0)
        system = apply_dirichlet(SparseSystem(A, r), dir_nodes)
        delta = np.zeros(topo.node_count)
        delta[system.free] = solve_linear(system)
        trial = sign_update_correction(temps, delta, config.update_sign)
        coords, temps, front, _ = project_on_C(
            topo, coords, trial, T0, front_prev=front_n, temps_prev=state_n.temps,
            mobility=mob, extra_s1=front, mode=config.relay_mode, metric=config.target_metric)
        Jc = asm._geometry(coords)[2]
        err = correction_norm(topo, mesh, Jc, delta)
        report.err_history.append(err)
        report.iterations = k + 1
        if not np.isfinite(err):
            break
        if err < config.epsilon:
            report.converged = True
            break

    final = StepState(coords, temps, t1)
    r = asm.residual(state_n, final, laws=res_laws, reg=reg)
    report.final_residual = float(np.max(np.abs(r[free]))) if len(free) else 0.0
    report.front_node_count = len(front)
    if not report.converged:
        log.warning("step to t=%.6g not converged after %d iterations (err=%.3g)",
                    t1, report.iterations, report.err_history[-1] if report.err_history else float("nan"))
    return final, front, report


def fixed_point_step(problem, state_n, front_n, dt, config=SolverConfig(), assembler=None, mobility=None):
    """Variant freezing each element's phase at its centroid temperature.

    The frozen-phase residual is linear in T, so each iteration is a single
    linear solve followed by projection.
    """
    return run_time_step(problem, state_n, front_n, dt, config, assembler, mobility, fixed_point=True)


def initial_front(problem, state, mobility=None):
    """Fit the mesh to the isotherm of an initial field (every node may move)."""
    coords, temps, front, _ = project_on_C(problem.topology, state.coords, state.temps,
                                           problem.props.T0,
                                           mobility=problem.mobility() if mobility is None else mobility)
    return StepState(coords, temps, state.time), front


__all__ = [
    "FrontState", "LinearSolverError", "SolverConfig", "StefanProblem", "StepReport",
    "correction_norm", "fixed_point_step", "initial_front", "run_time_step",
    "sign_update_correction", "solve_linear", "timestep_implicit", "timestep_sqrt",
]
