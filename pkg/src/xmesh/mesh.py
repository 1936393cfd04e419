"""Fixed-topology triangular meshes and ALE element kinematics.

A mesh is split in two parts: :class:`MeshTopology` (connectivity, boundary
groups) which never changes during a run, and :class:`MeshState` which holds
the frozen reference coordinates together with the current node positions.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

# Mid-edge quadrature is used everywhere; barycentric weights of the points.
# Each row is a point, each column a triangle vertex.
MID_EDGE_POINTS = np.array(
    [[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]], dtype=float
)
MID_EDGE_WEIGHTS = np.full(3, 1.0 / 3.0)


class MeshError(ValueError):
    """Invalid mesh input."""


class MshParseError(MeshError):
    """Malformed or unsupported gmsh file."""

    def __init__(self, message, line=None, section=None):
        self.line = line
        self.section = section
        where = []
        if section:
            where.append(f"section {section}")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class PointNotFoundError(LookupError):
    """A point lies outside every triangle of the mesh."""


@dataclass(frozen=True, eq=False)
class MeshTopology:
    """Node/edge/triangle adjacency. Immutable for the whole simulation.

    ``edge_triangles`` holds the (one or two) triangles incident to each
    edge, padded with -1 for boundary edges.  ``slide_nodes`` flags boundary
    nodes whose two boundary edges are collinear: those can move along the
    boundary without changing the domain shape.  Other boundary nodes
    (corners, nodes of curved boundaries) are pinned.
    """

    node_count: int
    triangles: np.ndarray
    edges: np.ndarray
    edge_triangles: np.ndarray
    triangle_edges: np.ndarray
    boundary_edges: np.ndarray
    boundary_nodes: np.ndarray
    groups: dict = field(default_factory=dict)
    slide_nodes: np.ndarray = None
    node_edge_ptr: np.ndarray = None
    node_edge_idx: np.ndarray = None

    @property
    def n_triangles(self):
        return len(self.triangles)

    @property
    def dirichlet_tags(self):
        return self.groups

    def incident_edges(self, node):
        return self.node_edge_idx[self.node_edge_ptr[node]:self.node_edge_ptr[node + 1]]

    def is_boundary_edge(self, edge):
        return self.edge_triangles[edge, 1] < 0

    def adjacency_hash(self):
        """SHA-256 of the adjacency arrays; constant over a run."""
        h = hashlib.sha256()
        for arr in (self.triangles, self.edges, self.edge_triangles, self.triangle_edges):
            h.update(np.ascontiguousarray(arr, dtype=np.int64).tobytes())
        return h.hexdigest()


@dataclass(eq=False)
class MeshState:
    """Reference coordinates X0, current coordinates X and reference areas A0."""

    reference_coords: np.ndarray
    current_coords: np.ndarray
    reference_areas: np.ndarray

    def __post_init__(self):
        self.reference_coords = np.array(self.reference_coords, dtype=float)
        self.reference_coords.flags.writeable = False
        self.reference_areas = np.array(self.reference_areas, dtype=float)
        self.reference_areas.flags.writeable = False
        self.current_coords = np.array(self.current_coords, dtype=float)

    def copy(self):
        return MeshState(self.reference_coords, self.current_coords.copy(), self.reference_areas)


@dataclass
class ElementKinematics:
    F: np.ndarray
    J: float
    J_clamped: float
    grad_operator: np.ndarray  # (3, 2); gradient = grad_operator.T @ nodal values


def signed_areas(triangles, coords):
    p0 = coords[triangles[:, 0]]
    d1 = coords[triangles[:, 1]] - p0
    d2 = coords[triangles[:, 2]] - p0
    return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])


def build_topology(triangles, coords, groups=None):
    """Derive edges, incidences and boundary data from a triangle list."""
    triangles = np.ascontiguousarray(triangles, dtype=np.int64)
    coords = np.asarray(coords, dtype=float)
    n_nodes = len(coords)
    n_tri = len(triangles)
    if n_tri == 0:
        raise MeshError("mesh has no triangles")
    if triangles.min() < 0 or triangles.max() >= n_nodes:
        raise MeshError("triangle references an unknown node")

    # local edge k joins vertices (k, k+1)
    local = np.array([[0, 1], [1, 2], [2, 0]])
    half = triangles[:, local].reshape(-1, 2)
    keys = np.sort(half, axis=1)
    edges, inverse, counts = np.unique(keys, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.reshape(-1)
    if counts.max() > 2:
        raise MeshError("non-manifold edge (more than two incident triangles)")
    triangle_edges = inverse.reshape(n_tri, 3)

    edge_triangles = np.full((len(edges), 2), -1, dtype=np.int64)
    owner = np.repeat(np.arange(n_tri), 3)
    order = np.argsort(inverse, kind="stable")
    sorted_edges = inverse[order]
    first = np.ones(len(order), dtype=bool)
    first[1:] = sorted_edges[1:] != sorted_edges[:-1]
    edge_triangles[sorted_edges[first], 0] = owner[order][first]
    edge_triangles[sorted_edges[~first], 1] = owner[order][~first]

    boundary_edges = np.flatnonzero(edge_triangles[:, 1] < 0)
    boundary_nodes = np.unique(edges[boundary_edges])

    # node -> incident edges (CSR)
    ends = edges.reshape(-1)
    edge_ids = np.repeat(np.arange(len(edges)), 2)
    order = np.argsort(ends, kind="stable")
    ptr = np.zeros(n_nodes + 1, dtype=np.int64)
    np.add.at(ptr, ends + 1, 1)
    ptr = np.cumsum(ptr)
    idx = edge_ids[order]

    slide = np.zeros(n_nodes, dtype=bool)
    bnd_mask = np.zeros(len(edges), dtype=bool)
    bnd_mask[boundary_edges] = True
    for node in boundary_nodes:
        inc = idx[ptr[node]:ptr[node + 1]]
        inc = inc[bnd_mask[inc]]
        if len(inc) != 2:
            continue
        vecs = []
        for e in inc:
            a, b = edges[e]
            other = b if a == node else a
            vecs.append(coords[other] - coords[node])
        u, v = vecs
        cross = u[0] * v[1] - u[1] * v[0]
        if abs(cross) <= 1e-10 * np.linalg.norm(u) * np.linalg.norm(v):
            slide[node] = True

    groups = {name: np.unique(np.asarray(nodes, dtype=np.int64)) for name, nodes in (groups or {}).items()}
    for arr in (triangles, edges, edge_triangles, triangle_edges, boundary_edges,
                boundary_nodes, slide, ptr, idx):
        arr.flags.writeable = False
    for arr in groups.values():
        arr.flags.writeable = False
    return MeshTopology(
        node_count=n_nodes,
        triangles=triangles,
        edges=edges,
        edge_triangles=edge_triangles,
        triangle_edges=triangle_edges,
        boundary_edges=boundary_edges,
        boundary_nodes=boundary_nodes,
        groups=groups,
        slide_nodes=slide,
        node_edge_ptr=ptr,
        node_edge_idx=idx,
    )


def _make(triangles, coords, groups):
    coords = np.asarray(coords, dtype=float)
    areas = signed_areas(np.asarray(triangles), coords)
    if np.any(areas <= 0):
        raise MeshError("reference triangles must be counter-clockwise with positive area")
    topo = build_topology(triangles, coords, groups)
    return topo, MeshState(coords, coords.copy(), areas)


DIAGONAL_PATTERNS = ("alternate", "right", "left")


def _grid_triangles(n1, n2, node_id, pattern="alternate"):
    """Split an n1 x n2 cell grid in triangles.

    ``pattern`` picks the cell diagonal: "alternate" (checkerboard), "right"
    (all from lower-left to upper-right) or "left".
    """
    if pattern not in DIAGONAL_PATTERNS:
        raise MeshError(f"unknown diagonal pattern {pattern!r}")
    tris = []
    for j in range(n2):
        for i in range(n1):
            a = node_id(i, j)
            b = node_id(i + 1, j)
            c = node_id(i + 1, j + 1)
            d = node_id(i, j + 1)
            if pattern == "right" or (pattern == "alternate" and (i + j) % 2 == 0):
                tris.append((a, b, c))
                tris.append((a, c, d))
            else:
                tris.append((a, b, d))
                tris.append((b, c, d))
    return np.array(tris, dtype=np.int64)


def generate_tensor_mesh(xs, ys, pattern="alternate"):
    """Triangulate the tensor grid ``xs`` x ``ys`` (strictly increasing)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.ndim != 1 or ys.ndim != 1 or len(xs) < 2 or len(ys) < 2:
        raise MeshError("need at least two grid lines per direction")
    if np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) <= 0):
        raise MeshError("grid lines must be strictly increasing")
    nx, ny = len(xs) - 1, len(ys) - 1
    X, Y = np.meshgrid(xs, ys)  # row j, column i
    coords = np.column_stack([X.ravel(), Y.ravel()])

    def node_id(i, j):
        return j * (nx + 1) + i

    tris = _grid_triangles(nx, ny, node_id, pattern)
    ii = np.arange(nx + 1)
    jj = np.arange(ny + 1)
    groups = {
        "left": node_id(0, jj),
        "right": node_id(nx, jj),
        "bottom": node_id(ii, 0),
        "top": node_id(ii, ny),
    }
    return _make(tris, coords, groups)


def generate_structured_mesh(nx, ny, bbox, pattern="alternate"):
    """Right-triangle split of an ``nx`` x ``ny`` grid over ``bbox = (x0, y0, x1, y1)``."""
    if int(nx) < 1 or int(ny) < 1:
        raise MeshError("nx and ny must be >= 1")
    x0, y0, x1, y1 = (float(v) for v in bbox)
    if not (x1 > x0 and y1 > y0):
        raise MeshError(f"degenerate bounding box {bbox!r}")
    xs = np.linspace(x0, x1, int(nx) + 1)
    ys = np.linspace(y0, y1, int(ny) + 1)
    return generate_tensor_mesh(xs, ys, pattern)


def generate_annulus_mesh(nr, ntheta, r_in, r_out, pattern="alternate"):
    """Polar structured triangulation of the ring ``r_in <= r <= r_out``."""
    nr, ntheta = int(nr), int(ntheta)
    r_in, r_out = float(r_in), float(r_out)
    if not (0.0 < r_in < r_out):
        raise MeshError(f"invalid radii r_in={r_in}, r_out={r_out}")
    if nr < 1 or ntheta < 3:
        raise MeshError("need nr >= 1 and ntheta >= 3")
    radii = np.linspace(r_in, r_out, nr + 1)
    radii[0], radii[-1] = r_in, r_out
    angles = 2.0 * np.pi * np.arange(ntheta) / ntheta
    R, A = np.meshgrid(radii, angles, indexing="ij")
    coords = np.column_stack([(R * np.cos(A)).ravel(), (R * np.sin(A)).ravel()])
    # exact radius on both circles
    for i in (0, nr):
        block = slice(i * ntheta, (i + 1) * ntheta)
        coords[block] *= (radii[i] / np.hypot(coords[block, 0], coords[block, 1]))[:, None]

    def node_id(i, j):
        return np.asarray(i) * ntheta + np.asarray(j) % ntheta

    tris = _grid_triangles(nr, ntheta, node_id, pattern)
    groups = {"inner": node_id(0, np.arange(ntheta)), "outer": node_id(nr, np.arange(ntheta))}
    return _make(tris, coords, groups)


# ---------------------------------------------------------------- gmsh reader

_SUPPORTED_TYPES = {1: 2, 2: 3, 15: 1}  # line, triangle, point -> node count
_SURFACE_TYPES = {3, 9, 10, 16, 20, 21, 22, 23, 24, 25}


def parse_msh(text):
    """Read an ASCII gmsh 2.2 file (bytes, str, path or file object).

    Triangles (type 2) become the mesh, lines (type 1) tagged with a physical
    group become boundary groups.  Groups are named from ``$PhysicalNames``
    when present, otherwise by the physical tag number.
    """
    if isinstance(text, Path):
        text = text.read_bytes()
    elif hasattr(text, "read"):
        text = text.read()
    if isinstance(text, bytes):
        text = text.decode("ascii")
    lines = text.splitlines()
    pos = 0
    n_lines = len(lines)

    def next_line(section):
        nonlocal pos
        while pos < n_lines:
            raw = lines[pos].strip()
            pos += 1
            if raw:
                return raw
        raise MshParseError("unexpected end of file", line=n_lines, section=section)

    version = None
    node_ids = {}
    node_xy = []
    triangles = []
    lines_by_tag = {}
    names = {}

    while pos < n_lines:
        raw = lines[pos].strip()
        pos += 1
        if not raw:
            continue
        if not raw.startswith("$"):
            raise MshParseError(f"expected a section header, got {raw[:30]!r}", line=pos)
        section = raw[1:]
        if section == "MeshFormat":
            start = pos
            parts = next_line(section).split()
            if not parts or parts[0] not in ("2.2", "2.1", "2"):
                raise MshParseError(f"unsupported MSH version {parts[0] if parts else '?'}",
                                    line=start + 1, section=section)
            if len(parts) > 1 and parts[1] != "0":
                raise MshParseError("binary MSH files are not supported", line=start + 1, section=section)
            version = parts[0]
        elif section == "PhysicalNames":
            count = _int(next_line(section), pos, section)
            for _ in range(count):
                m = re.match(r'\s*(\d+)\s+(\d+)\s+"(.*)"', next_line(section))
                if not m:
                    raise MshParseError("malformed physical name", line=pos, section=section)
                names[int(m.group(2))] = m.group(3)
        elif section == "Nodes":
            if version is None:
                raise MshParseError("$Nodes before $MeshFormat", line=pos, section=section)
            count = _int(next_line(section), pos, section)
            for _ in range(count):
                parts = next_line(section).split()
                if len(parts) < 3:
                    raise MshParseError("malformed node record", line=pos, section=section)
                try:
                    node_ids[int(parts[0])] = len(node_xy)
                    node_xy.append((float(parts[1]), float(parts[2])))
                except ValueError:
                    raise MshParseError("malformed node record", line=pos, section=section) from None
        elif section == "Elements":
            if version is None:
                raise MshParseError("$Elements before $MeshFormat", line=pos, section=section)
            count = _int(next_line(section), pos, section)
            for _ in range(count):
                parts = next_line(section).split()
                try:
                    vals = [int(p) for p in parts]
                except ValueError:
                    raise MshParseError("malformed element record", line=pos, section=section) from None
                if len(vals) < 3:
                    raise MshParseError("malformed element record", line=pos, section=section)
                etype, ntags = vals[1], vals[2]
                tags = vals[3:3 + ntags]
                nodes = vals[3 + ntags:]
                if etype in _SURFACE_TYPES:
                    raise MshParseError(f"unsupported 2D element type {etype}", line=pos, section=section)
                if etype not in _SUPPORTED_TYPES:
                    continue
                if len(nodes) != _SUPPORTED_TYPES[etype]:
                    raise MshParseError("wrong node count for element", line=pos, section=section)
                try:
                    local = [node_ids[n] for n in nodes]
                except KeyError as exc:
                    raise MshParseError(f"unknown node {exc.args[0]}", line=pos, section=section) from None
                if etype == 2:
                    triangles.append(local)
                elif etype == 1 and tags:
                    lines_by_tag.setdefault(tags[0], []).extend(local)
        else:
            pass  # unknown sections are skipped
        end = f"$End{section}"
        while True:
            if pos >= n_lines:
                raise MshParseError(f"missing {end}", line=n_lines, section=section)
            raw = lines[pos].strip()
            pos += 1
            if raw == end:
                break
            if section in ("MeshFormat", "Nodes", "Elements", "PhysicalNames") and raw:
                raise MshParseError(f"expected {end}, got {raw[:30]!r}", line=pos, section=section)

    if version is None:
        raise MshParseError("missing $MeshFormat section")
    if not triangles:
        raise MshParseError("no triangles found", section="Elements")

    xy = np.array(node_xy, dtype=float)
    tris = np.array(triangles, dtype=np.int64)
    used = np.unique(tris)
    renumber = np.full(len(xy), -1, dtype=np.int64)
    renumber[used] = np.arange(len(used))
    tris = renumber[tris]
    xy = xy[used]
    areas = signed_areas(tris, xy)
    flip = areas < 0
    tris[flip] = tris[flip][:, [0, 2, 1]]
    groups = {}
    for tag, nodes in lines_by_tag.items():
        nodes = renumber[np.asarray(nodes)]
        groups[names.get(tag, str(tag))] = np.unique(nodes[nodes >= 0])
    return _make(tris, xy, groups)


def _int(raw, line, section):
    try:
        return int(raw.split()[0])
    except (ValueError, IndexError):
        raise MshParseError(f"expected an integer count, got {raw[:30]!r}", line=line, section=section) from None


def read_msh(path):
    return parse_msh(Path(path).read_bytes())


# ------------------------------------------------------------ kinematics

def reference_gradients(topology, reference_coords):
    """Gradients of the three hat functions w.r.t. X0, shape (ne, 3, 2)."""
    tri = topology.triangles
    P = reference_coords[tri]
    D0 = np.stack([P[:, 1] - P[:, 0], P[:, 2] - P[:, 0]], axis=2)  # columns
    inv = np.linalg.inv(D0)  # rows are grad of phi1, phi2
    g = np.empty((len(tri), 3, 2))
    g[:, 1] = inv[:, 0]
    g[:, 2] = inv[:, 1]
    g[:, 0] = -g[:, 1] - g[:, 2]
    return g


def clamp_jacobian(J, floor):
    """``max(|J|, floor) * sign(J)`` with sign(0) = +1."""
    J = np.asarray(J, dtype=float)
    sign = np.where(J < 0, -1.0, 1.0)
    return np.maximum(np.abs(J), floor) * sign


def kinematics(topology, state, coords, a_tol, ref_grads=None):
    """Vectorized F, J, clamped J and current gradient operators.

    The inverse deformation gradient is taken as ``adj(F) / J_clamped`` so
    that zero-measure elements still yield finite gradients.
    """
    tri = topology.triangles
    X0 = state.reference_coords
    if ref_grads is None:
        ref_grads = reference_gradients(topology, X0)
    P0 = X0[tri]
    P = coords[tri]
    D0 = np.stack([P0[:, 1] - P0[:, 0], P0[:, 2] - P0[:, 0]], axis=2)
    D = np.stack([P[:, 1] - P[:, 0], P[:, 2] - P[:, 0]], axis=2)
    F = D @ np.linalg.inv(D0)
    J = F[:, 0, 0] * F[:, 1, 1] - F[:, 0, 1] * F[:, 1, 0]
    Jc = clamp_jacobian(J, a_tol / state.reference_areas)
    adj = np.empty_like(F)
    adj[:, 0, 0] = F[:, 1, 1]
    adj[:, 1, 1] = F[:, 0, 0]
    adj[:, 0, 1] = -F[:, 0, 1]
    adj[:, 1, 0] = -F[:, 1, 0]
    # g = F^{-T} grad0 ; row form: g_a = grad0_a @ F^{-1}
    grads = ref_grads @ (adj / Jc[:, None, None])
    return F, J, Jc, grads


class _SubTopo:
    def __init__(self, triangles):
        self.triangles = triangles


def _single_kinematics(topology, state, tid, a_tol):
    nodes = topology.triangles[tid]
    sub = _SubTopo(np.arange(3)[None, :])
    sub_state = MeshState(state.reference_coords[nodes], state.current_coords[nodes],
                          state.reference_areas[tid:tid + 1])
    return kinematics(sub, sub_state, sub_state.current_coords, a_tol)


def element_kinematics(topology, state, triangle_id, a_tol):
    """Deformation gradient, Jacobian (raw and clamped) and gradient operator of one triangle."""
    if not 0 <= triangle_id < topology.n_triangles:
        raise IndexError(f"triangle {triangle_id} out of range")
    F, J, Jc, grads = _single_kinematics(topology, state, triangle_id, a_tol)
    return ElementKinematics(F=F[0], J=float(J[0]), J_clamped=float(Jc[0]), grad_operator=grads[0])


def barycentric(topology, coords, point):
    """Barycentric coordinates of ``point`` in every triangle, shape (ne, 3)."""
    P = coords[topology.triangles]
    p = np.asarray(point, dtype=float)
    v0 = P[:, 1] - P[:, 0]
    v1 = P[:, 2] - P[:, 0]
    v2 = p - P[:, 0]
    det = v0[:, 0] * v1[:, 1] - v0[:, 1] * v1[:, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        l1 = (v2[:, 0] * v1[:, 1] - v2[:, 1] * v1[:, 0]) / det
        l2 = (v0[:, 0] * v2[:, 1] - v0[:, 1] * v2[:, 0]) / det
    return np.column_stack([1.0 - l1 - l2, l1, l2]), det


def locate_point(topology, state, point, coords=None, tol=1e-12):
    """Containing triangle (lowest id on ties) and barycentric weights of ``point``."""
    if coords is None:
        coords = state.current_coords
    lam, det = barycentric(topology, coords, point)
    scale = np.abs(det)
    ok = scale > 1e-14 * np.max(scale)
    inside = ok & np.all(lam >= -tol, axis=1)
    hits = np.flatnonzero(inside)
    if len(hits) == 0:
        raise PointNotFoundError(f"point {tuple(np.asarray(point, dtype=float))} is outside the mesh")
    tid = int(hits[0])
    return tid, lam[tid]
