"""Residual and tangent of the theta-scheme ALE weak form on P1 triangles.

Every element integral uses the three-point mid-edge rule.  The residual is
always built from the sharp laws; the tangent is the exact derivative of the
residual in which the sharp laws are swapped for the regularized ones (or
for the per-element frozen laws of the fixed-point variant).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .mesh import MID_EDGE_POINTS, MID_EDGE_WEIGHTS, kinematics, locate_point, reference_gradients
from .physics import RegularizationParams

N = MID_EDGE_POINTS
W = MID_EDGE_WEIGHTS


def subdivided_midedge_rule(m):
    """Mid-edge rule applied on the m*m congruent sub-triangles of an element.

    Returns ``(points, weights)`` with points as barycentric coordinates and
    weights summing to one.  ``m = 1`` is the plain three-point rule.
    """
    m = int(m)
    if m < 1:
        raise ValueError("subdivision level must be >= 1")
    pts = []
    for i in range(m):
        for j in range(m - i):
            tris = [((i, j), (i + 1, j), (i, j + 1))]
            if i + j < m - 1:
                tris.append(((i + 1, j), (i + 1, j + 1), (i, j + 1)))
            for tri in tris:
                ab = np.array(tri, dtype=float) / m
                for a, b in ((0, 1), (1, 2), (2, 0)):
                    pts.append(0.5 * (ab[a] + ab[b]))
    ab = np.array(pts)
    points = np.column_stack([1.0 - ab.sum(axis=1), ab])
    weights = np.full(len(points), 1.0 / len(points))
    return points, weights


@dataclass
class StepState:
    coords: np.ndarray
    temps: np.ndarray
    time: float

    def copy(self):
        return StepState(self.coords.copy(), self.temps.copy(), self.time)


@dataclass(frozen=True)
class DiracSink:
    """Line heat sink of intensity ``intensity`` [W/m].

    ``position`` is either a fixed point or a callable ``t -> (x, y)``.
    """

    position: object
    intensity: float

    def __post_init__(self):
        if not np.isfinite(self.intensity):
            raise ValueError("sink intensity must be finite")

    def position_at(self, t):
        if callable(self.position):
            return np.asarray(self.position(t), dtype=float)
        return np.asarray(self.position, dtype=float)


@dataclass(frozen=True)
class DirichletBC:
    """Prescribed temperature on ``nodes``.

    ``value`` is a constant or a callable ``(X, t) -> T`` evaluated at the
    reference positions of the nodes.
    """

    nodes: np.ndarray
    value: object

    def values(self, reference_coords, t):
        nodes = np.asarray(self.nodes)
        if callable(self.value):
            return np.broadcast_to(
                np.asarray(self.value(reference_coords[nodes], t), dtype=float), nodes.shape
            ).copy()
        return np.full(nodes.shape, float(self.value))


@dataclass
class SparseSystem:
    matrix: sp.csr_matrix
    rhs: np.ndarray
    free: np.ndarray = None


def dirichlet_values(bcs, reference_coords, t):
    """Concatenated (nodes, values) of all conditions; later ones win on overlap."""
    if not bcs:
        return np.empty(0, dtype=np.int64), np.empty(0)
    vals = {}
    for bc in bcs:
        for n, v in zip(np.asarray(bc.nodes).tolist(), bc.values(reference_coords, t).tolist()):
            vals[n] = v
    nodes = np.array(sorted(vals), dtype=np.int64)
    return nodes, np.array([vals[n] for n in nodes.tolist()])


def sink_contribution(sink, topology, state, coords=None, t=0.0):
    """Nodal loads ``-Q * barycentric weights`` of the element holding the sink."""
    tid, lam = locate_point(topology, state, sink.position_at(t), coords=coords)
    nodes = topology.triangles[tid]
    return [(int(n), -sink.intensity * float(w)) for n, w in zip(nodes, lam)]


def _laws(kind, Tq, Tc, props, reg):
    """Energy/conductivity and their derivatives at quadrature points.

    ``Tq`` (ne, 3) holds interpolated temperatures, ``Tc`` (ne,) the element
    centroid temperatures.  Sharp laws follow the ``T <= T0`` solid
    convention except at points sitting exactly on T0 (edges joining two
    front nodes) which take the phase of their element's centroid.
    """
    T0 = props.T0
    if kind == "reg":
        delta = reg.delta
        H = np.clip((Tq - (T0 - 0.5 * delta)) / delta, 0.0, 1.0)
        dH = np.where(np.abs(Tq - T0) <= 0.5 * delta, 1.0 / delta, 0.0)
        c = (1.0 - H) * props.c_s + H * props.c_l
        e = c * Tq + H * props.l_bar
        k = (1.0 - H) * props.k_s + H * props.k_l
        de = c + dH * ((props.c_l - props.c_s) * Tq + props.l_bar)
        dk = dH * (props.k_l - props.k_s)
        return e, k, de, dk
    if kind == "sharp":
        H = np.where(Tq == T0, (Tc > T0)[:, None], Tq > T0).astype(float)
    elif kind == "fixed":
        H = np.broadcast_to((Tc > T0)[:, None], Tq.shape).astype(float)
    else:
        raise ValueError(f"unknown law kind {kind!r}")
    c = (1.0 - H) * props.c_s + H * props.c_l
    e = c * Tq + H * props.l_bar
    k = (1.0 - H) * props.k_s + H * props.k_l
    return e, k, c, np.zeros_like(k)


class Assembler:
    """Residual/tangent assembly bound to one mesh and one set of parameters.

    Parameters
    ----------
    topology, mesh_state : mesh description (reference coordinates and areas).
    props : MaterialProperties
    theta : time-scheme parameter.
    a_tol : area floor of the Jacobian clamp [m^2].
    sinks : sequence of DiracSink.
    source : volumetric source S(t) [W/kg], callable or constant.
    """

    def __init__(self, topology, mesh_state, props, theta=0.5, a_tol=5e-9, sinks=(), source=0.0):
        self.topology = topology
        self.mesh = mesh_state
        self.props = props
        self.theta = float(theta)
        self.a_tol = float(a_tol)
        self.sinks = tuple(sinks)
        self.source = source
        self.ref_grads = reference_gradients(topology, mesh_state.reference_coords)
        tri = topology.triangles
        self._rows = np.repeat(tri, 3, axis=1).ravel()
        self._cols = np.tile(tri, (1, 3)).ravel()

    # -- helpers ---------------------------------------------------------
    def _geometry(self, coords):
        return kinematics(self.topology, self.mesh, coords, self.a_tol, self.ref_grads)

    def _source_value(self, t):
        return float(self.source(t)) if callable(self.source) else float(self.source)

    def source_loads(self, coords, t, Jc=None):
        """Nodal integrals of rho*S*phi_i*J plus Dirac loads at instant ``t``."""
        n = self.topology.node_count
        out = np.zeros(n)
        S = self._source_value(t)
        if S != 0.0:
            if Jc is None:
                Jc = self._geometry(coords)[2]
            per = self.props.rho * S * Jc * self.mesh.reference_areas / 3.0
            np.add.at(out, self.topology.triangles, per[:, None])
        for sink in self.sinks:
            for node, load in sink_contribution(sink, self.topology, self.mesh, coords, t):
                out[node] += load
        return out

    def _instant(self, coords, temps, w, law, reg, weight, want_tangent, rule=None):
        """Energy and weighted diffusion/advection contributions at one instant."""
        N, W = (MID_EDGE_POINTS, MID_EDGE_WEIGHTS) if rule is None else rule
        props = self.props
        tri = self.topology.triangles
        A0 = self.mesh.reference_areas
        _, _, Jc, g = self._geometry(coords)
        Te = temps[tri]
        Tq = Te @ N.T
        Tc = Te.mean(axis=1)
        e, k, de, dk = _laws(law, Tq, Tc, props, reg)
        wq = np.einsum("qa,ead->eqd", N, w[tri])
        gT = np.einsum("ead,ea->ed", g, Te)
        AJ = A0 * Jc

        energy = props.rho * AJ[:, None] * ((W * e) @ N)
        kbar = (W * k).sum(axis=1)
        diff = (AJ * kbar)[:, None] * np.einsum("ed,ead->ea", gT, g)
        adv = props.rho * AJ[:, None] * np.einsum("eq,eqd,ead->ea", W * e, wq, g)
        res = (energy, weight * (diff + adv))
        if not want_tangent:
            return res, None
        cap = props.rho * AJ[:, None, None] * np.einsum("eq,qi,qj->eij", W * de, N, N)
        gg = np.einsum("eid,ejd->eij", g, g)
        kdiff = AJ[:, None, None] * (
            kbar[:, None, None] * gg
            + np.einsum("eq,qj,ei->eij", W * dk, N, np.einsum("ed,eid->ei", gT, g))
        )
        kadv = props.rho * AJ[:, None, None] * np.einsum("eq,qj,eqd,eid->eij", W * de, N, wq, g)
        return res, cap + weight * (kdiff + kadv)

    def _scatter(self, per_element):
        out = np.zeros(self.topology.node_count)
        np.add.at(out, self.topology.triangles, per_element)
        return out

    # -- public API --------------------------------------------------------
    def residual(self, state_n, state_np1, laws="sharp", reg=None, want_tangent=False, old_laws="sharp",
                 rule=None):
        """Nodal residual r_i [J]; with ``want_tangent`` also dr_i/dT_j (csr).

        ``rule`` overrides the quadrature of the t^{n+1} terms, see
        :meth:`tangent`.
        """
        if state_n.coords.shape != state_np1.coords.shape or state_n.temps.shape != state_np1.temps.shape:
            raise ValueError("states live on different meshes")
        if state_n.temps.shape[0] != self.topology.node_count:
            raise ValueError("state size does not match the topology")
        dt = state_np1.time - state_n.time
        if not dt > 0:
            raise ValueError("time step must be positive")
        if laws == "reg" and reg is None:
            reg = RegularizationParams()
        theta = self.theta
        w = (state_np1.coords - state_n.coords) / dt
        (e1, f1), tangent_el = self._instant(state_np1.coords, state_np1.temps, w, laws, reg,
                                             theta * dt, want_tangent, rule)
        (e0, f0), _ = self._instant(state_n.coords, state_n.temps, w, old_laws, reg,
                                    (1.0 - theta) * dt, False)
        r = self._scatter(e1 - e0 + f1 + f0)
        if self._has_sources():
            r -= theta * dt * self.source_loads(state_np1.coords, state_np1.time)
            r -= (1.0 - theta) * dt * self.source_loads(state_n.coords, state_n.time)
        if not want_tangent:
            return r
        n = self.topology.node_count
        A = sp.coo_matrix((tangent_el.ravel(), (self._rows, self._cols)), shape=(n, n)).tocsr()
        return r, A

    def tangent(self, state_n, state_np1, reg=None, laws="reg", rule=None):
        """dr/dT^{n+1} of the residual built on ``laws``.

        ``rule`` (points, weights) integrates the t^{n+1} terms; a finer rule
        than the residual's resolves the narrow regularization band better
        without changing the sharp residual itself.
        """
        return self.residual(state_n, state_np1, laws=laws, reg=reg, want_tangent=True, rule=rule)[1]

    def _has_sources(self):
        return bool(self.sinks) or callable(self.source) or float(self.source) != 0.0

    def energy_integral(self, state, laws="sharp", reg=None):
        """Quadrature value of the integral of rho*e(T)*J over the reference domain."""
        tri = self.topology.triangles
        _, _, Jc, _ = self._geometry(state.coords)
        Te = state.temps[tri]
        e = _laws(laws, Te @ N.T, Te.mean(axis=1), self.props, reg)[0]
        return float(np.sum(self.props.rho * self.mesh.reference_areas * Jc * (W * e).sum(axis=1)))


def assemble_residual(topology, mesh_state, state_n, state_np1, theta, props, sinks=(), a_tol=5e-9, source=0.0):
    asm = Assembler(topology, mesh_state, props, theta, a_tol, sinks, source)
    return asm.residual(state_n, state_np1)


def assemble_tangent(topology, mesh_state, state_np1, state_n, theta, props, reg, sinks=(), a_tol=5e-9, source=0.0):
    asm = Assembler(topology, mesh_state, props, theta, a_tol, sinks, source)
    return asm.tangent(state_n, state_np1, reg=reg)


def apply_dirichlet(system, fixed_nodes, fixed_values=None):
    """Eliminate constrained rows/columns; prescribed values move to the rhs.

    Returns a new SparseSystem over the free nodes (``free`` holds their ids).
    """
    A = sp.csr_matrix(system.matrix)
    n = A.shape[0]
    fixed = np.zeros(n, dtype=bool)
    fixed_nodes = np.asarray(fixed_nodes, dtype=np.int64)
    fixed[fixed_nodes] = True
    free = np.flatnonzero(~fixed)
    rhs = np.asarray(system.rhs, dtype=float)[free]
    if fixed_values is not None and len(fixed_nodes):
        u = np.zeros(n)
        u[fixed_nodes] = fixed_values
        rhs = rhs - (A @ u)[free]
    return SparseSystem(A[free][:, free].tocsr(), rhs, free)

