"""File formats: case configs, VTK snapshots and time-series CSV.

Config files are flat ``dotted.key = value`` lines.  Floats are written with
``repr`` (shortest round-tripping decimal), so save/load is bit exact.
"""

from __future__ import annotations

import csv
import dataclasses
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .cases import CaseConfig, MeshSpec, OutputSpec, SinkSpec, TimeSeries, TimeSpec
from .physics import MaterialProperties
from .solver import SolverConfig


class ConfigError(ValueError):
    """Malformed config text."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


# ------------------------------------------------------------------ config

_SECTIONS = {"mesh": MeshSpec, "props": MaterialProperties, "solver": SolverConfig,
             "time": TimeSpec, "output": OutputSpec}


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _init_fields(cls):
    return [f for f in dataclasses.fields(cls) if f.init]


def config_to_text(cfg):
    """Serialize a CaseConfig as sorted-by-section ``key = value`` lines."""
    lines = []
    for f in _init_fields(CaseConfig):
        value = getattr(cfg, f.name)
        if f.name in _SECTIONS:
            for g in _init_fields(_SECTIONS[f.name]):
                lines.append(f"{f.name}.{g.name} = {_fmt(getattr(value, g.name))}")
        elif f.name == "bc":
            for group in sorted(value):
                v = value[group]
                lines.append(f"bc.{group} = {v if isinstance(v, str) else repr(float(v))}")
        elif f.name == "sinks":
            for i, s in enumerate(value):
                for g in _init_fields(SinkSpec):
                    lines.append(f"sinks.{i}.{g.name} = {_fmt(getattr(s, g.name))}")
        else:
            lines.append(f"{f.name} = {_fmt(value)}")
    return "\n".join(lines) + "\n"


def _parse_value(raw, like, key, line):
    try:
        if isinstance(like, bool):
            low = raw.lower()
            if low not in ("true", "false", "1", "0"):
                raise ValueError(raw)
            return low in ("true", "1")
        if isinstance(like, int):
            return int(raw)
        if isinstance(like, float):
            return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r} as {type(like).__name__}", line) from None
    return raw


def config_from_text(text):
    """Parse config text; missing keys keep the CaseConfig defaults."""
    base = CaseConfig()
    top, sections, bc, sinks = {}, {name: {} for name in _SECTIONS}, {}, {}
    for lineno, raw_line in enumerate(text.splitlines(), 1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw_line.strip()!r}", lineno)
        key, raw = (s.strip() for s in line.split("=", 1))
        parts = key.split(".")
        if parts[0] in _SECTIONS and len(parts) == 2:
            cls = _SECTIONS[parts[0]]
            names = {f.name for f in _init_fields(cls)}
            if parts[1] not in names:
                raise ConfigError(f"unknown key {key!r}", lineno)
            like = getattr(getattr(base, parts[0]), parts[1])
            sections[parts[0]][parts[1]] = _parse_value(raw, like, key, lineno)
        elif parts[0] == "bc" and len(parts) == 2:
            bc[parts[1]] = raw if raw == "exact" else _parse_value(raw, 0.0, key, lineno)
        elif parts[0] == "sinks" and len(parts) == 3:
            if not parts[1].isdigit():
                raise ConfigError(f"sink index must be an integer in {key!r}", lineno)
            names = {f.name: f.default for f in _init_fields(SinkSpec)}
            if parts[2] not in names:
                raise ConfigError(f"unknown key {key!r}", lineno)
            sinks.setdefault(int(parts[1]), {})[parts[2]] = _parse_value(raw, names[parts[2]], key, lineno)
        elif len(parts) == 1 and parts[0] in {f.name for f in _init_fields(CaseConfig)} \
                and parts[0] not in ("bc", "sinks") and parts[0] not in _SECTIONS:
            top[parts[0]] = _parse_value(raw, getattr(base, parts[0]), key, lineno)
        else:
            raise ConfigError(f"unknown key {key!r}", lineno)

    if sorted(sinks) != list(range(len(sinks))):
        raise ConfigError(f"sink indices must be 0..n-1, got {sorted(sinks)}")
    try:
        built = {name: dataclasses.replace(getattr(base, name), **vals) if name != "props"
                 else MaterialProperties(**{**_props_dict(base.props), **vals})
                 for name, vals in sections.items()}
        return CaseConfig(**top, **built, bc=bc, sinks=tuple(SinkSpec(**sinks[i]) for i in sorted(sinks)))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _props_dict(props):
    return {f.name: getattr(props, f.name) for f in _init_fields(MaterialProperties)}


def save_config(cfg, path):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(config_to_text(cfg))
    except OSError as exc:
        raise OSError(f"cannot write config {path}: {exc}") from exc


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    return config_from_text(text)


# ------------------------------------------------------------------ VTK

@dataclass
class VtkFields:
    """Named nodal (``point``) and element (``cell``) scalar arrays."""

    point: dict = field(default_factory=dict)
    cell: dict = field(default_factory=dict)


def standard_fields(topology, mesh_state, state, T0, a_tol=5e-9):
    """Temperature, displacement magnitude, phase by centroid and clamp flag."""
    from .mesh import kinematics

    temps = np.asarray(state.temps, dtype=float)
    coords = np.asarray(state.coords, dtype=float)
    disp = np.linalg.norm(coords - mesh_state.reference_coords, axis=1)
    centroid_T = temps[topology.triangles].mean(axis=1)
    _, J, _, _ = kinematics(topology, mesh_state, coords, a_tol)
    clamped = np.abs(J) < a_tol / mesh_state.reference_areas
    return VtkFields(
        point={"temperature": temps, "displacement": disp},
        cell={"phase": (centroid_T > T0).astype(int), "clamped": clamped.astype(int)},
    )


def snapshot_path(out_dir, step, prefix="step", width=5):
    return os.path.join(out_dir, f"{prefix}_{int(step):0{width}d}.vtk")


def _check_lengths(arrays, n, where):
    out = {}
    for name, values in arrays.items():
        a = np.asarray(values)
        if a.ndim != 1 or len(a) != n:
            raise ValueError(f"{where} field {name!r} has shape {a.shape}, expected ({n},)")
        if " " in name:
            raise ValueError(f"field name {name!r} must not contain spaces")
        out[name] = a
    return out


def _vtk_number(v):
    if isinstance(v, (bool, np.bool_)) or np.issubdtype(type(v), np.integer):
        return str(int(v))
    return "%.17g" % float(v)


def vtk_text(topology, state, fields, title="xmesh"):
    """Legacy ASCII UNSTRUCTURED_GRID text for one snapshot."""
    coords = np.asarray(state.coords, dtype=float)
    tri = np.asarray(topology.triangles)
    n, m = len(coords), len(tri)
    point = _check_lengths(fields.point, n, "point")
    cell = _check_lengths(fields.cell, m, "cell")
    out = ["# vtk DataFile Version 3.0", title, "ASCII", "DATASET UNSTRUCTURED_GRID",
           f"POINTS {n} double"]
    out += [f"{_vtk_number(x)} {_vtk_number(y)} 0" for x, y in coords]
    out.append(f"CELLS {m} {4 * m}")
    out += [f"3 {a} {b} {c}" for a, b, c in tri.tolist()]
    out.append(f"CELL_TYPES {m}")
    out += ["5"] * m
    for header, count, arrays in (("POINT_DATA", n, point), ("CELL_DATA", m, cell)):
        if not arrays:
            continue
        out.append(f"{header} {count}")
        for name, a in arrays.items():
            kind = "int" if np.issubdtype(a.dtype, np.integer) or a.dtype == bool else "double"
            out += [f"SCALARS {name} {kind} 1", "LOOKUP_TABLE default"]
            out += [_vtk_number(v) for v in a.tolist()]
    return "\n".join(out) + "\n"


def write_vtk(topology, state, fields, path):
    """Write one snapshot; IO errors name the path."""
    text = vtk_text(topology, state, fields)
    try:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write VTK file {path}: {exc}") from exc
    return path


# ------------------------------------------------------------------ CSV

SERIES_COLUMNS = ("time_s", "front_pos_m", "xi", "iterations", "err_K")


def write_series_csv(series, path):
    rows = zip(series.times, series.front_pos, series.xi, series.iterations, series.err)
    try:
        with open(path, "w", encoding="ascii", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(SERIES_COLUMNS)
            for t, pos, xi, it, err in rows:
                w.writerow(["%.17g" % t, "%.17g" % pos, "%.17g" % xi, str(int(it)), "%.17g" % err])
    except OSError as exc:
        raise OSError(f"cannot write series {path}: {exc}") from exc
    return path


def read_series_csv(path):
    """Read back the columns written by :func:`write_series_csv` into a TimeSeries."""
    series = TimeSeries()
    with open(path, encoding="ascii", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != SERIES_COLUMNS:
            raise ValueError(f"{path}: unexpected header {header}")
        for row in reader:
            if len(row) != len(SERIES_COLUMNS):
                raise ValueError(f"{path}: row {reader.line_num} has {len(row)} columns")
            series.times.append(float(row[0]))
            series.front_pos.append(float(row[1]))
            series.xi.append(float(row[2]))
            series.iterations.append(int(row[3]))
            series.err.append(float(row[4]))
    return series


def write_events_csv(series, path):
    with open(path, "w", encoding="ascii", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("time_s", "event"))
        for t, kind in series.events:
            w.writerow(("%.17g" % t, kind))
    return path


def same_float(a, b):
    """Bitwise float equality with NaN equal to NaN."""
    return (math.isnan(a) and math.isnan(b)) or a == b


__all__ = [
    "ConfigError", "SERIES_COLUMNS", "VtkFields", "config_from_text", "config_to_text", "load_config",
    "read_series_csv", "same_float", "save_config", "snapshot_path", "standard_fields", "vtk_text",
    "write_events_csv", "write_series_csv", "write_vtk",
]
