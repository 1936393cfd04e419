import math
from dataclasses import replace

import numpy as np
import pytest

from xmesh.cases import (CATALOG, CaseConfig, CaseError, MeshSpec, RelaySnapshot, SinkSpec, TimeSeries, TimeSpec,
                         build_problem, convergence_sweep, graded_axis, large_step_config, loglog_slope,
                         persistent_inversions, phase_events, run_case, run_relay_demo, simulate,
                         straight_front_config)
from xmesh.front import FrontState

T0 = 273.15


class TestSpecs:
    def test_sqrt_schedule(self):
        ts = TimeSpec(t0=100.0, t_max=1e6, schedule="sqrt", value=100.0)
        assert ts.next_dt(100.0) == pytest.approx(100.0)

    def test_lands_on_t_max(self):
        ts = TimeSpec(t0=0.0, t_max=10.5, schedule="constant", value=1.0)
        t = 0.0
        while t < 10.5:
            t += ts.next_dt(t)
        assert t == 10.5

    def test_implicit_schedule(self):
        ts = TimeSpec(t0=0.0, t_max=1e9, schedule="implicit", value=90000.0)
        assert ts.next_dt(0.0) == 90000.0

    def test_unknown_schedule(self):
        with pytest.raises(CaseError):
            TimeSpec(schedule="log").next_dt(1.0)

    def test_rotating_sink_path(self):
        s = SinkSpec(500.0, 0.0, 0.0, 0.75, 240.0, math.pi)
        assert np.allclose(s.position(0.0), (-0.75, 0.0), atol=1e-15)
        assert np.allclose(s.position(60.0), (0.0, -0.75), atol=1e-15)
        assert np.allclose(s.to_sink().position_at(240.0), (-0.75, 0.0), atol=1e-14)

    def test_fixed_sink(self):
        sink = SinkSpec(100.0).to_sink()
        assert not callable(sink.position)
        assert np.array_equal(sink.position_at(1e5), (0.0, 0.0))

    def test_graded_axis(self):
        xs = graded_axis(-1.5, 1.5, 0.5, 0.02, 0.25)
        assert xs[0] == pytest.approx(-1.5) and xs[-1] == pytest.approx(1.5)
        assert np.any(xs == 0.0)
        d = np.diff(xs)
        assert np.all(d > 0)
        core = d[np.abs(xs[:-1]) < 0.45]
        assert np.allclose(core, core[0]) and abs(core[0] - 0.02) < 0.1 * 0.02
        assert d.max() <= 0.25 * 1.2

    def test_mesh_kinds(self):
        topo, _ = MeshSpec("annulus", 0.03, r_in=0.01, r_out=0.1).build()
        assert {"inner", "outer"} <= set(topo.groups)
        with pytest.raises(CaseError):
            MeshSpec("voronoi").build()


class TestValidation:
    def test_unknown_kind(self):
        with pytest.raises(CaseError):
            CaseConfig(kind="dendrite").validate()

    def test_times(self):
        with pytest.raises(CaseError):
            replace(straight_front_config(), time=TimeSpec(t0=10.0, t_max=5.0)).validate()

    def test_missing_group(self):
        cfg = replace(straight_front_config(0.05), bc={"north": 260.0})
        with pytest.raises(CaseError, match="north"):
            build_problem(cfg)

    def test_bad_bc_string(self):
        with pytest.raises(CaseError):
            replace(straight_front_config(), bc={"left": "cold"}).validate()

    def test_exact_bc_without_solution(self):
        cfg = CATALOG["rotating_sinks"](0.5)
        cfg = replace(cfg, bc={"left": "exact"})
        with pytest.raises(CaseError, match="exact"):
            build_problem(cfg)

    def test_missing_initial_temperature(self):
        cfg = replace(CATALOG["rotating_sinks"](0.5), T_init=float("nan"))
        with pytest.raises(CaseError):
            simulate(cfg)

    def test_catalog_configs_validate(self):
        for name, make in CATALOG.items():
            make().validate()

    def test_wrong_runner(self):
        from xmesh.cases import run_case_axisym_easy
        with pytest.raises(CaseError):
            run_case_axisym_easy(straight_front_config())

    def test_large_step_has_five_steps(self):
        cfg = large_step_config()
        t, n = cfg.time.t0, 0
        while t < cfg.time.t_max * (1 - 1e-9):
            t += cfg.time.next_dt(t)
            n += 1
        assert n == 5 and cfg.solver.theta == 1.0


def _cells(mask):
    return np.where(np.asarray(mask, dtype=bool), 260.0, 280.0)


class TestPhaseEvents:
    def test_nothing(self, unit2):
        topo, _ = unit2
        T = _cells([1, 0, 0, 1, 0, 0, 1, 0, 0])
        assert phase_events(topo, T, T, T0) == []

    def test_nucleation(self, unit2):
        topo, _ = unit2
        assert phase_events(topo, np.full(9, 280.0), _cells(np.arange(9) == 4), T0) == ["nucleation"]

    def test_annihilation_by_melting(self, unit2):
        topo, _ = unit2
        assert phase_events(topo, _cells(np.arange(9) == 4), np.full(9, 280.0), T0) == ["annihilation"]

    def test_annihilation_by_freezing(self, unit2):
        topo, _ = unit2
        assert phase_events(topo, _cells(np.arange(9) != 4), np.full(9, 260.0), T0) == ["annihilation"]

    def test_coalescence(self, unit2):
        topo, _ = unit2
        prev = _cells(np.isin(np.arange(9), [0, 8]))
        cur = _cells(np.isin(np.arange(9), [0, 4, 8]))
        assert phase_events(topo, prev, cur, T0) == ["coalescence"]

    def test_front_nodes_count_as_solid(self, unit2):
        topo, _ = unit2
        cur = np.full(9, 280.0)
        cur[4] = T0
        assert phase_events(topo, np.full(9, 280.0), cur, T0) == ["nucleation"]


class TestTimeSeries:
    def test_append_order(self):
        s = TimeSeries()
        s.append(1.0, 0.1, 0.1, 0, 0.0, True, 0.0, 3, True, True, "h")
        with pytest.raises(ValueError):
            s.append(1.0, 0.1, 0.1, 0, 0.0, True, 0.0, 3, True, True, "h")

    def test_xi(self):
        s = TimeSeries()
        s.append(0.0, None, None, 0, 0.0, True, 0.0, 0, True, True, "h")
        s.append(1.0, 0.11, 0.1, 3, 1e-6, True, 0.0, 3, True, True, "h")
        s.append(2.0, 0.22, 0.2, 4, 1e-6, True, 0.0, 3, True, True, "h")
        assert math.isnan(s.xi[0])
        assert s.xi[1] == pytest.approx(0.1)
        assert s.xi_bar() == pytest.approx(0.1)
        assert s.step_iterations() == [3, 4]
        assert s.all_converged

    def test_no_front(self):
        s = TimeSeries()
        s.append(0.0, None, None, 0, 0.0, True, 0.0, 0, True, True, "h")
        assert math.isnan(s.xi_bar())


class TestSimulate:
    def test_short_straight_front(self):
        cfg = straight_front_config(0.02)
        cfg = replace(cfg, time=replace(cfg.time, max_steps=3))
        seen = []
        series = simulate(cfg, callback=lambda step, p, st, fr, rep: seen.append((step, rep is None)))
        assert len(series) == 4
        assert seen[0] == (0, True) and [s for s, _ in seen] == [0, 1, 2, 3]
        assert all(series.compatible) and all(series.min_jacobian_ok)
        assert len(set(series.topology_hashes)) == 1
        assert series.events == []
        assert all(np.isfinite(series.xi[1:]))
        # the early front lies within the first two elements at this size
        assert max(series.xi[1:]) < 0.3

    def test_deterministic(self):
        cfg = straight_front_config(0.025)
        cfg = replace(cfg, time=replace(cfg.time, max_steps=2))
        a, b = run_case(cfg), run_case(cfg)
        assert a.front_pos == b.front_pos and a.err == b.err

    def test_fixed_point_variant_runs(self):
        cfg = straight_front_config(0.025, fixed_point=True)
        cfg = replace(cfg, time=replace(cfg.time, max_steps=2))
        series = run_case(cfg)
        assert len(series) == 3 and all(series.compatible)


class TestSweep:
    def test_single_size_has_no_slope(self):
        cfg = straight_front_config()
        cfg = replace(cfg, time=replace(cfg.time, max_steps=1))
        res = convergence_sweep(cfg, [0.05])
        assert res.slope is None and len(res.rows()) == 1

    def test_duplicate_sizes(self):
        cfg = straight_front_config()
        cfg = replace(cfg, time=replace(cfg.time, max_steps=1))
        res = convergence_sweep(cfg, [0.05, 0.05])
        assert res.slope is None
        assert res.xi_bar[0] == res.xi_bar[1]

    def test_empty(self):
        with pytest.raises(CaseError):
            convergence_sweep(straight_front_config(), [])

    def test_slope(self):
        h = np.array([0.04, 0.02, 0.01])
        assert loglog_slope(h, 3 * h ** 2) == pytest.approx(2.0)


class TestRelayDemo:
    def test_relay_keeps_front_on_line(self):
        snaps = run_relay_demo(n=8, samples=10)
        assert len(snaps) == 11
        assert all(s.compatible for s in snaps)
        assert max(s.max_front_residual for s in snaps) < 1e-12
        assert persistent_inversions(snaps) == []

    def test_anti_relay_tangles(self):
        snaps = run_relay_demo(n=10, samples=20, anti=True)
        assert len(persistent_inversions(snaps)) > 0

    def test_persistence_counting(self):
        def snap(inv):
            return RelaySnapshot(0.0, None, None, FrontState(), 0.0, True, tuple(inv))
        snaps = [snap([1, 2]), snap([1]), snap([1, 2]), snap([2]), snap([2])]
        assert persistent_inversions(snaps) == [1, 2]
        assert persistent_inversions(snaps, min_samples=4) == []
