"""Scenario catalog: straight front, axisymmetric (easy/hard), rotating sinks.

Every case is described by a :class:`CaseConfig` and produces a
:class:`TimeSeries`.  The relay demo only exercises the mesh-motion part
(no heat equation) and returns a list of snapshots.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import analytic
from .assembly import DiracSink, DirichletBC, StepState
from .front import (FrontState, ProjectionError, inverted_elements, is_compatible, node_mobility,
                    project_on_C, relax_in_C)
from .mesh import generate_annulus_mesh, generate_structured_mesh, generate_tensor_mesh, kinematics, read_msh
from .physics import ICE_WATER, MaterialProperties
from .solver import (LinearSolverError, SolverConfig, StefanProblem, fixed_point_step, initial_front,
                     run_time_step)
from .solver import timestep_implicit, timestep_sqrt

log = logging.getLogger(__name__)

CASE_KINDS = ("straight_front", "axisym_easy", "axisym_hard", "rotating_sinks")
HOUR = 3600.0


class CaseError(ValueError):
    """Inconsistent case description."""


@dataclass(frozen=True)
class MeshSpec:
    """How to build the mesh.

    kind: "structured" (bbox, h), "annulus" (r_in, r_out, h), "graded"
    (square bbox, fine core of half-width ``core`` meshed at ``h``, cells
    growing geometrically up to ``h_max``) or "msh" (``path``).
    """

    kind: str = "structured"
    h: float = 0.01
    x0: float = 0.0
    y0: float = 0.0
    x1: float = 0.1
    y1: float = 0.1
    r_in: float = 0.01
    r_out: float = 0.1
    core: float = 0.0
    h_max: float = 0.0
    pattern: str = "alternate"
    path: str = ""

    def build(self):
        if self.kind == "structured":
            nx = max(1, int(round((self.x1 - self.x0) / self.h)))
            ny = max(1, int(round((self.y1 - self.y0) / self.h)))
            return generate_structured_mesh(nx, ny, (self.x0, self.y0, self.x1, self.y1), self.pattern)
        if self.kind == "annulus":
            nr = max(1, int(round((self.r_out - self.r_in) / self.h)))
            nt = max(3, int(round(math.pi * (self.r_in + self.r_out) / self.h)))
            return generate_annulus_mesh(nr, nt, self.r_in, self.r_out, self.pattern)
        if self.kind == "graded":
            xs = graded_axis(self.x0, self.x1, self.core, self.h, self.h_max)
            ys = graded_axis(self.y0, self.y1, self.core, self.h, self.h_max)
            return generate_tensor_mesh(xs, ys, self.pattern)
        if self.kind == "msh":
            return read_msh(self.path)
        raise CaseError(f"unknown mesh kind {self.kind!r}")


def graded_axis(a, b, core, h, h_max, ratio=1.15):
    """Grid lines on [a, b] symmetric about its midpoint.

    Uniform spacing ``h`` within ``core`` of the midpoint, then growing by
    ``ratio`` per cell up to ``h_max``; the whole axis is then scaled so the
    last line lands on the boundary.  The midpoint is always a grid line.
    """
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    h_max = max(h_max, h)
    pos = [0.0]
    step = h
    while pos[-1] < half - 1e-12:
        if pos[-1] >= core - 1e-12:
            step = min(step * ratio, h_max)
        pos.append(pos[-1] + step)
    pos = np.array(pos)
    pos *= half / pos[-1]
    side = mid + pos
    return np.concatenate([mid - pos[:0:-1], side])


@dataclass(frozen=True)
class TimeSpec:
    """Time stepping: ``schedule`` is "constant" (dt = value), "sqrt"
    (dt = sqrt(value * t_n)) or "implicit" (first step = value)."""

    t0: float = 500.0
    t_max: float = 4.68 * HOUR
    schedule: str = "sqrt"
    value: float = 100.0
    max_steps: int = 100000

    def next_dt(self, t):
        if self.schedule == "constant":
            dt = self.value
        elif self.schedule == "sqrt":
            dt = timestep_sqrt(self.value, t)
        elif self.schedule == "implicit":
            dt = timestep_implicit(self.value, t)
        else:
            raise CaseError(f"unknown time schedule {self.schedule!r}")
        # land exactly on t_max, merging a sliver of a last step
        if t + 1.001 * dt >= self.t_max:
            dt = self.t_max - t
        return dt


@dataclass(frozen=True)
class SinkSpec:
    """Line sink on a circular path (radius 0 gives a fixed sink)."""

    intensity: float = 100.0
    cx: float = 0.0
    cy: float = 0.0
    radius: float = 0.0
    period: float = 0.0
    phase: float = 0.0

    def position(self, t):
        if self.radius == 0.0 or self.period == 0.0:
            return np.array([self.cx + self.radius * math.cos(self.phase),
                             self.cy + self.radius * math.sin(self.phase)])
        a = self.phase + 2.0 * math.pi * t / self.period
        return np.array([self.cx + self.radius * math.cos(a), self.cy + self.radius * math.sin(a)])

    def to_sink(self):
        if self.radius == 0.0 or self.period == 0.0:
            return DiracSink(tuple(self.position(0.0)), self.intensity)
        return DiracSink(self.position, self.intensity)


@dataclass(frozen=True)
class OutputSpec:
    out_dir: str = ""
    vtk_every: int = 0
    prefix: str = "step"


@dataclass(frozen=True)
class CaseConfig:
    """Complete scenario description.

    ``bc`` maps boundary group names to a constant temperature or to the
    string "exact" (exact solution of the case evaluated on the boundary).
    ``T_init`` is the uniform initial temperature for cases without an
    exact initial field; ``NaN`` means "exact solution at t0".
    """

    kind: str = "straight_front"
    mesh: MeshSpec = MeshSpec()
    props: MaterialProperties = ICE_WATER
    solver: SolverConfig = SolverConfig()
    time: TimeSpec = TimeSpec()
    T_s: float = 263.15
    T_l: float = 293.15
    Q: float = 100.0
    T_init: float = float("nan")
    bc: dict = field(default_factory=dict)
    sinks: tuple = ()
    output: OutputSpec = OutputSpec()
    fixed_point: bool = False
    seed: int = 0

    def validate(self, topology=None):
        if self.kind not in CASE_KINDS:
            raise CaseError(f"unknown case kind {self.kind!r}")
        if not self.time.t0 < self.time.t_max:
            raise CaseError("t0 must be smaller than t_max")
        if topology is not None:
            missing = sorted(set(self.bc) - set(topology.groups))
            if missing:
                raise CaseError(f"boundary groups {missing} not in mesh (have {sorted(topology.groups)})")
        for name, v in self.bc.items():
            if isinstance(v, str) and v != "exact":
                raise CaseError(f"bc.{name}: expected a number or 'exact', got {v!r}")

    def with_size(self, h):
        return replace(self, mesh=replace(self.mesh, h=float(h)))


@dataclass
class TimeSeries:
    """Per-step record of a run (the initial state is sample 0)."""

    times: list = field(default_factory=list)
    front_pos: list = field(default_factory=list)
    xi: list = field(default_factory=list)
    iterations: list = field(default_factory=list)
    err: list = field(default_factory=list)
    converged: list = field(default_factory=list)
    residual_reduction: list = field(default_factory=list)
    front_nodes: list = field(default_factory=list)
    compatible: list = field(default_factory=list)
    min_jacobian_ok: list = field(default_factory=list)
    events: list = field(default_factory=list)  # (time, kind)
    topology_hashes: list = field(default_factory=list)
    exact_pos: list = field(default_factory=list)

    def append(self, t, pos, exact, iterations, err, converged, reduction, nfront, compatible, jac_ok, topo_hash):
        if self.times and not t > self.times[-1]:
            raise ValueError("sample times must be strictly increasing")
        self.times.append(float(t))
        self.front_pos.append(float("nan") if pos is None else float(pos))
        self.exact_pos.append(float("nan") if exact is None else float(exact))
        if pos is None or exact is None or exact <= 0:
            self.xi.append(float("nan"))
        else:
            self.xi.append(abs(pos - exact) / exact)
        self.iterations.append(int(iterations))
        self.err.append(float(err))
        self.converged.append(bool(converged))
        self.residual_reduction.append(float(reduction))
        self.front_nodes.append(int(nfront))
        self.compatible.append(bool(compatible))
        self.min_jacobian_ok.append(bool(jac_ok))
        self.topology_hashes.append(topo_hash)

    def __len__(self):
        return len(self.times)

    @property
    def all_converged(self):
        return all(self.converged)

    @property
    def event_kinds(self):
        return [k for _, k in self.events]

    def xi_bar(self, skip_first=True):
        """Integrated relative front error over samples with an exact position."""
        t = np.asarray(self.times)
        x = np.asarray(self.front_pos)
        ex = np.asarray(self.exact_pos)
        ok = np.isfinite(x) & np.isfinite(ex)
        if skip_first:
            ok[0] = False
        if ok.sum() == 0:
            return float("nan")
        return analytic.front_error(t[ok], x[ok], ex[ok])[1]

    def step_iterations(self):
        """Iteration counts of actual steps (sample 0 is the initial state)."""
        return self.iterations[1:]


# ------------------------------------------------------------------ events

def _labels(topology, mask):
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components
    a, b = topology.edges[:, 0], topology.edges[:, 1]
    keep = mask[a] & mask[b]
    n = topology.node_count
    g = coo_matrix((np.ones(keep.sum()), (a[keep], b[keep])), shape=(n, n))
    _, lab = connected_components(g, directed=False)
    lab = np.where(mask, lab, -1)
    return lab


def phase_events(topology, temps_prev, temps_cur, T0):
    """Topology events between two fields from the overlap of phase components.

    nucleation: a solid component sharing no node with an earlier solid one;
    coalescence: a solid component containing nodes of several earlier ones;
    annihilation: an earlier liquid (or solid) component with no surviving
    node, i.e. a pocket that froze (or melted) completely.
    """
    events = []
    for phase, sign in (("solid", True), ("liquid", False)):
        old = (np.asarray(temps_prev) <= T0) == sign
        new = (np.asarray(temps_cur) <= T0) == sign
        lo = _labels(topology, old)
        ln = _labels(topology, new)
        old_ids = np.unique(lo[old])
        new_ids = np.unique(ln[new])
        for c in old_ids:
            if not np.any(new[lo == c]):
                events.append("annihilation")
        for c in new_ids:
            members = ln == c
            parents = np.unique(lo[members & old])
            if phase == "solid" and len(parents) == 0:
                events.append("nucleation")
            if phase == "solid" and len(parents) > 1:
                events.extend(["coalescence"] * (len(parents) - 1))
    return events


# ----------------------------------------------------------------- helpers

def _exact_solution(cfg):
    if cfg.kind == "straight_front":
        return analytic.PlanarSolution(cfg.props, cfg.T_s, cfg.T_l)
    if cfg.kind in ("axisym_easy", "axisym_hard"):
        return analytic.AxisymSolution(cfg.props, cfg.Q, cfg.T_l)
    return None


def _exact_field(cfg, sol):
    if sol is None:
        return None
    if cfg.kind == "straight_front":
        return lambda X, t: analytic.exact_planar(X[:, 0], t, sol)
    return lambda X, t: analytic.exact_axisym(np.hypot(X[:, 0], X[:, 1]), t, sol)


def build_problem(cfg):
    """Mesh, material and loading of a case as a StefanProblem."""
    topo, mesh = cfg.mesh.build()
    cfg.validate(topo)
    sol = _exact_solution(cfg)
    field_fn = _exact_field(cfg, sol)
    bcs = []
    for name in sorted(cfg.bc):
        v = cfg.bc[name]
        if v == "exact":
            if field_fn is None:
                raise CaseError(f"bc.{name} = exact but case {cfg.kind!r} has no exact solution")
            bcs.append(DirichletBC(topo.groups[name], field_fn))
        else:
            bcs.append(DirichletBC(topo.groups[name], float(v)))
    sinks = tuple(s.to_sink() for s in cfg.sinks)
    return StefanProblem(topo, mesh, cfg.props, tuple(bcs), sinks), sol


def _front_position(cfg, front, coords):
    return analytic.numerical_front_position(front, coords, radial=cfg.kind != "straight_front")


def _checks(problem, state, front, a_tol):
    topo, mesh = problem.topology, problem.mesh
    T0 = problem.props.T0
    compat = is_compatible(topo, state.temps, T0) and bool(np.all(state.temps[front.as_array()] == T0))
    _, _, Jc, _ = kinematics(topo, mesh, state.coords, a_tol)
    floor = a_tol / mesh.reference_areas
    jac_ok = bool(np.all(np.abs(Jc) >= floor * (1 - 1e-12)))
    return compat, jac_ok


def simulate(cfg, problem=None, sol=None, callback=None):
    """Run a case from t0 to t_max; returns the TimeSeries.

    ``callback(step, problem, state, front, report)`` is called after the
    initial state (report None) and after every step.  A linear-solver or
    projection failure propagates with the partial series attached as
    ``exc.series``.
    """
    cfg.validate()
    if problem is None:
        problem, sol = build_problem(cfg)
    topo, mesh, props = problem.topology, problem.mesh, problem.props
    T0 = props.T0
    X = mesh.reference_coords
    t = cfg.time.t0
    if math.isnan(cfg.T_init):
        if sol is None:
            raise CaseError("T_init is required for cases without an exact solution")
        temps0 = _exact_field(cfg, sol)(X, t)
    else:
        temps0 = np.full(topo.node_count, float(cfg.T_init))
    if t > 0 or not _needs_positive_time(cfg):
        nodes, vals = problem.dirichlet(t)
        temps0[nodes] = vals
    mobility = problem.mobility()
    state, front = initial_front(problem, StepState(X.copy(), temps0, t), mobility)
    asm = problem.assembler(cfg.solver)
    series = TimeSeries()
    topo_hash = topo.adjacency_hash()
    compat, jac_ok = _checks(problem, state, front, cfg.solver.a_tol)

    def exact_pos(tt):
        return float(sol.front(tt)) if sol is not None and tt > 0 else None

    series.append(t, _front_position(cfg, front, state.coords), exact_pos(t), 0, 0.0, True, 0.0,
                  len(front), compat, jac_ok, topo_hash)
    if callback:
        callback(0, problem, state, front, None)
    step = 0
    stepper = fixed_point_step if cfg.fixed_point else run_time_step
    while state.time < cfg.time.t_max - 1e-9 * cfg.time.t_max and step < cfg.time.max_steps:
        dt = cfg.time.next_dt(state.time)
        prev = state
        try:
            state, front, rep = stepper(problem, prev, front, dt, cfg.solver, assembler=asm, mobility=mobility)
        except (LinearSolverError, ProjectionError) as exc:
            # keep what was computed so far for diagnostics
            exc.series = series
            raise
        step += 1
        for kind in phase_events(topo, prev.temps, state.temps, T0):
            series.events.append((state.time, kind))
            log.info("t=%.6g s: %s", state.time, kind)
        compat, jac_ok = _checks(problem, state, front, cfg.solver.a_tol)
        series.append(state.time, _front_position(cfg, front, state.coords), exact_pos(state.time),
                      rep.iterations, rep.err_history[-1] if rep.err_history else float("nan"),
                      rep.converged, rep.residual_reduction, len(front), compat, jac_ok, topo.adjacency_hash())
        log.debug("step %d t=%.6g dt=%.6g iters=%d front=%d", step, state.time, dt, rep.iterations, len(front))
        if callback:
            callback(step, problem, state, front, rep)
    return series


def _needs_positive_time(cfg):
    # exact boundary data is singular at t = 0; the uniform initial value stands in
    return any(v == "exact" for v in cfg.bc.values())


# ------------------------------------------------------------- catalog

def straight_front_config(h=0.01, l=0.0, **overrides):
    """0.1 m square, wall at T_s on the left, exact solution on the right."""
    props = ICE_WATER.with_latent_heat(l)
    if l == 0:
        time = TimeSpec(t0=500.0, t_max=4.68 * HOUR, schedule="sqrt", value=100.0)
    else:
        time = TimeSpec(t0=1000.0, t_max=23.71 * HOUR, schedule="sqrt", value=100.0)
    cfg = CaseConfig(kind="straight_front", mesh=MeshSpec("structured", h, 0.0, 0.0, 0.1, 0.1),
                     props=props, time=time, bc={"left": 263.15, "right": "exact"})
    return replace(cfg, **overrides)


def large_step_config(h=0.01, **overrides):
    """Latent straight front crossing the domain in five steps, backward Euler."""
    cfg = straight_front_config(h, 3.3e5)
    # five steps of dt = sqrt(beta * t_n) starting from t0
    t, times = 2000.0, []
    for _ in range(5):
        t += math.sqrt(20000.0 * t)
        times.append(t)
    cfg = replace(cfg, time=TimeSpec(t0=2000.0, t_max=times[-1], schedule="sqrt", value=20000.0),
                  solver=replace(cfg.solver, theta=1.0))
    return replace(cfg, **overrides)


def axisym_easy_config(h=0.005, **overrides):
    """Ring 0.01 < r < 0.1 m with the exact line-sink solution on both circles (l = 0)."""
    cfg = CaseConfig(kind="axisym_easy", mesh=MeshSpec("annulus", h, r_in=0.01, r_out=0.1),
                     props=ICE_WATER.with_latent_heat(0.0),
                     time=TimeSpec(t0=HOUR, t_max=18.9 * HOUR, schedule="sqrt", value=25.0),
                     bc={"inner": "exact", "outer": "exact"})
    return replace(cfg, **overrides)


def axisym_hard_config(h=0.02, **overrides):
    """3 x 3 m square, sink of 100 W/m at the centre, nucleation from a uniform liquid."""
    cfg = CaseConfig(kind="axisym_hard",
                     mesh=MeshSpec("graded", h, -1.5, -1.5, 1.5, 1.5, core=0.5, h_max=0.25),
                     props=ICE_WATER,
                     time=TimeSpec(t0=0.0, t_max=1000.0 * HOUR, schedule="implicit", value=25.0 * HOUR),
                     T_init=293.15,
                     bc={"left": "exact", "right": "exact", "bottom": "exact", "top": "exact"},
                     sinks=(SinkSpec(100.0),))
    return replace(cfg, **overrides)


def rotating_sinks_config(h=0.05, **overrides):
    """Two 500 W/m sinks circling at r = 0.75 m with a 240 h period; one period simulated."""
    period = 240.0 * HOUR
    sinks = (SinkSpec(500.0, 0.0, 0.0, 0.75, period, 0.0), SinkSpec(500.0, 0.0, 0.0, 0.75, period, math.pi))
    cfg = CaseConfig(kind="rotating_sinks", mesh=MeshSpec("structured", h, -1.5, -1.5, 1.5, 1.5),
                     props=ICE_WATER, T_l=283.15, T_init=283.15,
                     time=TimeSpec(t0=0.0, t_max=period, schedule="constant", value=4.0 * HOUR),
                     bc={g: 283.15 for g in ("left", "right", "bottom", "top")}, sinks=sinks)
    return replace(cfg, **overrides)


CATALOG = {
    "straight_front": straight_front_config,
    "straight_front_latent": lambda h=0.01, **kw: straight_front_config(h, 3.3e5, **kw),
    "large_step": large_step_config,
    "axisym_easy": axisym_easy_config,
    "axisym_hard": axisym_hard_config,
    "rotating_sinks": rotating_sinks_config,
}


def _check_kind(cfg, kind):
    if cfg.kind != kind:
        raise CaseError(f"expected a {kind!r} case, got {cfg.kind!r}")


def run_case_straight_front(cfg, callback=None):
    _check_kind(cfg, "straight_front")
    return simulate(cfg, callback=callback)


def run_case_axisym_easy(cfg, callback=None):
    _check_kind(cfg, "axisym_easy")
    return simulate(cfg, callback=callback)


def run_case_axisym_hard(cfg, callback=None):
    _check_kind(cfg, "axisym_hard")
    return simulate(cfg, callback=callback)


def run_case_rotating_sinks(cfg, callback=None):
    _check_kind(cfg, "rotating_sinks")
    return simulate(cfg, callback=callback)


RUNNERS = {
    "straight_front": run_case_straight_front,
    "axisym_easy": run_case_axisym_easy,
    "axisym_hard": run_case_axisym_hard,
    "rotating_sinks": run_case_rotating_sinks,
}


def run_case(cfg, callback=None):
    return RUNNERS[cfg.kind](cfg, callback=callback)


# ------------------------------------------------------------- sweeps

@dataclass
class SweepResult:
    sizes: list
    xi_bar: list
    slope: float = None
    series: list = None

    def rows(self):
        return list(zip(self.sizes, self.xi_bar))


def _sweep_one(cfg):
    return run_case(cfg)


def loglog_slope(sizes, values):
    """Least-squares slope of log(values) against log(sizes)."""
    return float(np.polyfit(np.log(np.asarray(sizes, float)), np.log(np.asarray(values, float)), 1)[0])


def convergence_sweep(cfg, element_sizes, workers=1):
    """Run ``cfg`` for each element size; fit the log-log slope of xi_bar against h."""
    sizes = [float(h) for h in element_sizes]
    if not sizes:
        raise CaseError("need at least one element size")
    cfgs = [cfg.with_size(h) for h in sizes]
    if workers > 1 and len(cfgs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            series = list(pool.map(_sweep_one, cfgs))
    else:
        series = [_sweep_one(c) for c in cfgs]
    xi = [s.xi_bar() for s in series]
    slope = None
    if len(set(sizes)) >= 2:
        slope = loglog_slope(sizes, xi)
    return SweepResult(sizes, xi, slope, series)


# ------------------------------------------------------------- relay demo

@dataclass
class RelaySnapshot:
    t: float
    coords: np.ndarray
    values: np.ndarray
    front: FrontState
    max_front_residual: float
    compatible: bool
    inverted: tuple


def rotating_line_field(X, t):
    return X[:, 1] * math.cos(t) + X[:, 0] * math.sin(t)


def run_relay_demo(n=10, samples=20, t_end=math.pi / 5, anti=False, pattern="alternate",
                   keep=0.9, pull=0.1):
    """Track the zero line of y cos t + x sin t on the unit square centred at 0.

    Returns the snapshot at t = 0 followed by ``samples`` snapshots evenly
    spaced up to ``t_end``.  Each sample samples the field at the current
    node positions, projects on the compatible set (relay or anti-relay
    active nodes) and then relaxes the nodes that left the front.
    """
    topo, mesh = generate_structured_mesh(n, n, (-0.5, -0.5, 0.5, 0.5), pattern)
    X0 = mesh.reference_coords
    mob = node_mobility(topo)
    coords = X0.copy()
    vals = rotating_line_field(coords, 0.0)
    coords, vals, front, _ = project_on_C(topo, coords, vals, 0.0, mobility=mob)
    snaps = [_relay_snapshot(topo, 0.0, coords, vals, front)]
    mode = "anti" if anti else "relay"
    for t in np.linspace(0.0, t_end, samples + 1)[1:]:
        prev_vals = vals
        vals = rotating_line_field(coords, t)
        coords, vals, front, _ = project_on_C(topo, coords, vals, 0.0, front_prev=front, temps_prev=prev_vals,
                                              mobility=mob, mode=mode)
        snaps.append(_relay_snapshot(topo, float(t), coords, vals, front))
        vals, coords = relax_in_C(vals, coords, X0, front, keep, pull)
        # the relaxed nodes carry the field value of their new position
        vals = np.where(_front_mask(front, len(vals)), 0.0, rotating_line_field(coords, t))
    return snaps


def _front_mask(front, n):
    m = np.zeros(n, dtype=bool)
    m[front.as_array()] = True
    return m


def _relay_snapshot(topo, t, coords, vals, front):
    f = rotating_line_field(coords, t)
    fr = front.as_array()
    res = float(np.max(np.abs(f[fr]))) if len(fr) else 0.0
    return RelaySnapshot(t, coords.copy(), vals.copy(), front, res, is_compatible(topo, vals, 0.0),
                         tuple(inverted_elements(topo, coords).tolist()))


def persistent_inversions(snapshots, min_samples=3):
    """Elements inverted in at least ``min_samples`` consecutive snapshots."""
    run = {}
    best = {}
    for s in snapshots:
        cur = set(s.inverted)
        for e in list(run):
            if e not in cur:
                del run[e]
        for e in cur:
            run[e] = run.get(e, 0) + 1
            best[e] = max(best.get(e, 0), run[e])
    return sorted(e for e, c in best.items() if c >= min_samples)


__all__ = [
    "CASE_KINDS", "CATALOG", "CaseConfig", "CaseError", "MeshSpec", "OutputSpec", "RelaySnapshot",
    "SinkSpec", "SweepResult", "TimeSeries", "TimeSpec", "axisym_easy_config", "axisym_hard_config",
    "build_problem", "convergence_sweep", "graded_axis", "large_step_config",
    "loglog_slope", "persistent_inversions", "phase_events", "rotating_line_field", "rotating_sinks_config",
    "run_case", "run_case_axisym_easy", "run_case_axisym_hard", "run_case_rotating_sinks",
    "run_case_straight_front", "run_relay_demo", "simulate", "straight_front_config",
]
