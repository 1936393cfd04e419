"""Keeping the mesh compatible with the transition isotherm.

A (mesh, temperature) pair is compatible when no edge has endpoint
temperatures strictly on both sides of T0: the front then runs along mesh
edges and through nodes.  :func:`project_on_C` restores compatibility by
sliding selected nodes along edges to the linear-interpolation crossing and
pinning their temperature to exactly T0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

FIXED, SLIDE, FREE = 0, 1, 2


class ProjectionError(RuntimeError):
    """Compatibility could not be restored."""


@dataclass(frozen=True)
class FrontState:
    front_nodes: frozenset = frozenset()

    @classmethod
    def from_temps(cls, temps, T0):
        return cls(frozenset(np.flatnonzero(np.asarray(temps) == T0).tolist()))

    def __len__(self):
        return len(self.front_nodes)

    def as_array(self):
        return np.array(sorted(self.front_nodes), dtype=np.int64)


@dataclass(frozen=True)
class RelaySets:
    s1: frozenset
    s2: frozenset
    active: frozenset


@dataclass
class ProjectionInfo:
    passes: int = 0
    moved: tuple = ()
    dropped: tuple = ()
    moves: dict = None  # node -> (edge, s, old position)


def crossed_edges(topology, temps, T0):
    """Indices of edges whose endpoint temperatures strictly straddle T0."""
    t = np.asarray(temps, dtype=float) - T0
    a, b = topology.edges[:, 0], topology.edges[:, 1]
    return np.flatnonzero(t[a] * t[b] < 0.0)


def is_compatible(topology, temps, T0):
    return len(crossed_edges(topology, temps, T0)) == 0


def node_mobility(topology, fixed_nodes=()):
    """FIXED for pinned/Dirichlet nodes, SLIDE along a straight boundary, FREE inside."""
    mob = np.full(topology.node_count, FREE, dtype=np.int8)
    mob[topology.boundary_nodes] = FIXED
    mob[topology.slide_nodes] = SLIDE
    fixed_nodes = np.asarray(list(fixed_nodes), dtype=np.int64)
    mob[fixed_nodes] = FIXED
    return mob


def _as_mask(nodes, n):
    mask = np.zeros(n, dtype=bool)
    if nodes is None:
        return mask
    if isinstance(nodes, FrontState):
        nodes = nodes.front_nodes
    if isinstance(nodes, np.ndarray) and nodes.dtype == bool:
        return nodes.copy()
    idx = np.fromiter(nodes, dtype=np.int64) if not isinstance(nodes, np.ndarray) else nodes
    mask[idx] = True
    return mask


def sign_changed(temps_prev, temps_cur, T0):
    """Nodes strictly on opposite sides of T0 in the two fields."""
    p = np.asarray(temps_prev, dtype=float) - T0
    c = np.asarray(temps_cur, dtype=float) - T0
    return p * c < 0.0


def relay_sets(front_prev, temps_prev, temps_cur, T0, topology, extra_s1=None):
    """S1 (previous front plus sign flips), S2 (crossed-edge endpoints), active = S1 & S2."""
    n = topology.node_count
    s1 = _as_mask(front_prev, n) | _as_mask(extra_s1, n)
    if temps_prev is not None:
        s1 |= sign_changed(temps_prev, temps_cur, T0)
    s2 = np.zeros(n, dtype=bool)
    s2[topology.edges[crossed_edges(topology, temps_cur, T0)].ravel()] = True
    return RelaySets(_fs(s1), _fs(s2), _fs(s1 & s2))


def _fs(mask):
    return frozenset(np.flatnonzero(mask).tolist())


def _candidates(node, temps, T0, topology, coords, crossed_mask, mobility, metric):
    out = []
    if mobility is not None and mobility[node] == FIXED:
        return out
    slide_only = mobility is not None and mobility[node] == SLIDE
    for e in topology.incident_edges(node):
        if not crossed_mask[e]:
            continue
        if slide_only and not topology.is_boundary_edge(e):
            continue
        a, b = topology.edges[e]
        other = b if a == node else a
        Tn, To = temps[node], temps[other]
        s = (T0 - Tn) / (To - Tn)
        vec = coords[other] - coords[node]
        length = float(np.hypot(vec[0], vec[1]))
        key = s * length if metric == "travel" else length
        out.append((key, int(node), int(e), int(other), float(s)))
    return out


def choose_target(node, temps_cur, T0, topology, coords, mobility=None, metric="travel"):
    """Incident crossed edge giving the shortest move, as ``(edge, s)``, or None.

    ``s`` is the crossing parameter from ``node`` towards the other endpoint.
    With ``metric="edge"`` the shortest edge is chosen instead of the
    shortest travel.  Nodes sliding on a straight boundary only use boundary
    edges; when no mobility is given, a boundary node with a crossed boundary
    edge still prefers it.
    """
    temps_cur = np.asarray(temps_cur, dtype=float)
    crossed = np.zeros(len(topology.edges), dtype=bool)
    crossed[crossed_edges(topology, temps_cur, T0)] = True
    cands = _candidates(node, temps_cur, T0, topology, coords, crossed, mobility, metric)
    if mobility is None:
        bnd = [c for c in cands if topology.is_boundary_edge(c[2])]
        if bnd:
            cands = bnd
    if not cands:
        return None
    key, _, e, _, s = min(cands)
    return e, s


def project_on_C(topology, coords, temps, T0, front_prev=None, temps_prev=None, mobility=None,
                 extra_s1=None, mode="relay", metric="travel", max_passes=3):
    """Move active nodes onto the isotherm along edges and set them to T0.

    Parameters
    ----------
    coords, temps : current iterate (not modified).
    front_prev : previous front nodes (FrontState, iterable or mask).
    temps_prev : field of the previous converged instant, used to detect sign
        changes.  ``None`` together with an empty front makes every node
        eligible, as needed to fit an initial condition to the mesh.
    mobility : output of :func:`node_mobility`; FIXED nodes never move.
    mode : "relay" (active = S1 & S2) or "anti" (active = S2 minus S1), the
        latter only for demonstrating why relaying is needed.

    Returns ``(coords, temps, FrontState, ProjectionInfo)``.
    """
    coords = np.array(coords, dtype=float)
    temps = np.array(temps, dtype=float)
    n = topology.node_count
    if mobility is None:
        mobility = node_mobility(topology)
    info = ProjectionInfo(moves={})
    eligible_all = temps_prev is None and not _as_mask(front_prev, n).any() and extra_s1 is None
    dropped = set()

    for npass in range(max_passes):
        crossed = crossed_edges(topology, temps, T0)
        if len(crossed) == 0:
            break
        info.passes = npass + 1
        if npass == 0 and not eligible_all:
            sets = relay_sets(front_prev, temps_prev, temps, T0, topology, extra_s1)
            s1 = _as_mask(sets.s1, n)
            s2 = _as_mask(sets.s2, n)
            active = (s2 & ~s1) if mode == "anti" else (s1 & s2)
            dropped |= set(np.flatnonzero(s1 & ~s2).tolist())
        else:
            active = np.zeros(n, dtype=bool)
            active[topology.edges[crossed].ravel()] = True
        crossed_mask = np.zeros(len(topology.edges), dtype=bool)
        crossed_mask[crossed] = True
        cands = []
        for node in np.flatnonzero(active):
            cands.extend(_candidates(node, temps, T0, topology, coords, crossed_mask, mobility, metric))
        cands.sort()
        moving = {}
        for key, node, e, other, s in cands:
            if node in moving or other in moving:
                continue
            moving[node] = (e, other, s)
        for node, (e, other, s) in moving.items():
            old = coords[node].copy()
            info.moves[node] = (e, s, old)
        # simultaneous update from pre-projection positions
        targets = {node: coords[node] + s * (coords[other] - coords[node])
                   for node, (e, other, s) in moving.items()}
        for node, x in targets.items():
            coords[node] = x
            temps[node] = T0
    else:
        if len(crossed_edges(topology, temps, T0)):
            raise ProjectionError(f"compatibility not restored after {max_passes} passes")

    front = FrontState.from_temps(temps, T0)
    info.moved = tuple(sorted(info.moves))
    info.dropped = tuple(sorted(d for d in dropped if d not in front.front_nodes))
    return coords, temps, front, info


def relax_in_C(temps_n, coords_n, reference_coords, front_n, keep=0.9, pull=0.1):
    """Pull every non-front node back towards its reference position.

    ``X = keep * X^n + pull * X0`` (written as ``X0 + keep * (X^n - X0)``,
    which is the same when ``keep + pull == 1``).  Temperatures are copied,
    so the crossing pattern and hence compatibility are unchanged.
    """
    coords = np.array(coords_n, dtype=float)
    X0 = np.asarray(reference_coords, dtype=float)
    mask = ~_as_mask(front_n, len(coords))
    if abs(keep + pull - 1.0) < 1e-15:
        coords[mask] = X0[mask] + keep * (coords[mask] - X0[mask])
    else:
        coords[mask] = keep * coords[mask] + pull * X0[mask]
    return np.array(temps_n, dtype=float), coords


# ------------------------------------------------------------ components

def _components(topology, mask):
    """Number of connected components of the node subset ``mask`` via mesh edges."""
    idx = np.flatnonzero(mask)
    if len(idx) == 0:
        return 0
    a, b = topology.edges[:, 0], topology.edges[:, 1]
    keep = mask[a] & mask[b]
    n = topology.node_count
    g = coo_matrix((np.ones(keep.sum()), (a[keep], b[keep])), shape=(n, n))
    _, labels = connected_components(g, directed=False)
    return len(np.unique(labels[idx]))


def front_components(topology, front):
    return _components(topology, _as_mask(front, topology.node_count))


def phase_components(topology, temps, T0):
    """(solid, liquid) component counts; T <= T0 counts as solid."""
    temps = np.asarray(temps)
    solid = temps <= T0
    return _components(topology, solid), _components(topology, ~solid)


def inverted_elements(topology, coords, rtol=1e-10):
    """Ids of triangles with negative signed area in ``coords``.

    Flat triangles (all nodes on a straight front) have areas at round-off
    level of either sign; an element only counts as inverted when its
    doubled area is below ``-rtol`` times its squared longest edge.
    """
    P = np.asarray(coords)[topology.triangles]
    d1 = P[:, 1] - P[:, 0]
    d2 = P[:, 2] - P[:, 0]
    d3 = P[:, 2] - P[:, 1]
    L2 = np.max([np.sum(d * d, axis=1) for d in (d1, d2, d3)], axis=0)
    return np.flatnonzero(d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0] < -rtol * L2)
