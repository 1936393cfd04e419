import numpy as np
import pytest

from xmesh.front import (FIXED, FREE, SLIDE, FrontState, ProjectionError, choose_target, crossed_edges,
                         front_components, inverted_elements, is_compatible, node_mobility, phase_components,
                         project_on_C, relax_in_C, relay_sets, sign_changed)
from xmesh.mesh import generate_structured_mesh

T0 = 273.15


def _hot_centre(n=9, centre=4, hot=280.0):
    T = np.full(n, 270.0)
    T[centre] = hot
    return T


class TestCrossings:
    def test_hot_centre(self, unit2):
        topo, _ = unit2
        crossed = crossed_edges(topo, _hot_centre(), T0)
        assert sorted(map(tuple, topo.edges[crossed].tolist())) == [(0, 4), (1, 4), (2, 4), (3, 4), (4, 5),
                                                                     (4, 6), (4, 7), (4, 8)]
        assert not is_compatible(topo, _hot_centre(), T0)

    def test_node_on_isotherm_is_not_a_crossing(self, unit2):
        topo, _ = unit2
        T = _hot_centre()
        T[[1, 3, 5, 7]] = T0
        # only the diagonals from the corners still cross
        crossed = crossed_edges(topo, T, T0)
        assert sorted(map(tuple, topo.edges[crossed].tolist())) == [(0, 4), (2, 4), (4, 6), (4, 8)]
        T[[0, 2, 6, 8]] = T0
        assert is_compatible(topo, T, T0)

    def test_front_from_temps(self):
        assert FrontState.from_temps([T0, 270.0, T0], T0).front_nodes == {0, 2}
        assert len(FrontState()) == 0


class TestMobility:
    def test_classes(self, unit2):
        topo, _ = unit2
        mob = node_mobility(topo, fixed_nodes=[3])
        assert mob[4] == FREE
        assert mob[0] == FIXED  # corner
        assert mob[1] == SLIDE
        assert mob[3] == FIXED


class TestRelaySets:
    def test_nucleation(self, unit2):
        topo, _ = unit2
        prev = np.full(9, 270.0)
        sets = relay_sets(FrontState(), prev, _hot_centre(), T0, topo)
        assert sets.s1 == {4}
        assert sets.s2 == set(range(9))
        assert sets.active == {4}

    def test_annihilation(self, unit2):
        topo, _ = unit2
        prev = np.full(9, 270.0)
        prev[4] = T0
        sets = relay_sets(FrontState(frozenset({4})), prev, np.full(9, 270.0), T0, topo)
        assert sets.s1 == {4} and sets.s2 == set() and sets.active == set()

    def test_sign_changed_is_strict(self):
        assert sign_changed([270.0, T0, 280.0], [280.0, 280.0, 290.0], T0).tolist() == [True, False, False]


class TestChooseTarget:
    def test_shortest_travel(self, unit2):
        topo, mesh = unit2
        e, s = choose_target(4, _hot_centre(), T0, topo, mesh.reference_coords)
        assert s == pytest.approx(0.685, abs=1e-13)
        assert tuple(topo.edges[e]) == (1, 4)  # first of the equally short axis edges

    def test_edge_metric_and_uneven_crossings(self):
        topo, mesh = generate_structured_mesh(1, 1, (0, 0, 1, 2))
        X = mesh.reference_coords  # 0:(0,0) 1:(1,0) 2:(0,2) 3:(1,2)
        T = np.array([280.0, 273.0, 260.0, 270.0])
        # travel: towards node 1, s = 6.85/7, distance 0.979; towards node 2 s = 6.85/20, distance 0.685
        e, s = choose_target(0, T, T0, topo, X, metric="travel")
        assert tuple(topo.edges[e]) == (0, 2)
        assert s == pytest.approx(6.85 / 20.0)
        e, s = choose_target(0, T, T0, topo, X, metric="edge")
        assert tuple(topo.edges[e]) == (0, 1)
        assert s == pytest.approx(6.85 / 7.0)

    def test_fixed_node_has_no_target(self, unit2):
        topo, mesh = unit2
        T = _hot_centre(centre=0)
        assert choose_target(0, T, T0, topo, mesh.reference_coords, mobility=node_mobility(topo)) is None


class TestProjection:
    def test_identity_when_compatible(self, unit2):
        topo, mesh = unit2
        T = np.linspace(260, 270, 9)
        c, t, front, info = project_on_C(topo, mesh.reference_coords, T, T0)
        assert np.array_equal(c, mesh.reference_coords)
        assert np.array_equal(t, T)
        assert len(front) == 0 and info.passes == 0

    def test_single_flip(self, unit2):
        topo, mesh = unit2
        X = mesh.reference_coords
        c, t, front, info = project_on_C(topo, X, _hot_centre(), T0, temps_prev=np.full(9, 270.0),
                                         front_prev=FrontState())
        assert front.front_nodes == {4}
        assert t[4] == T0
        assert np.allclose(c[4], (0.5, 0.1575), atol=1e-13)
        others = np.arange(9) != 4
        assert np.array_equal(c[others], X[others])
        assert is_compatible(topo, t, T0)
        assert info.moved == (4,)

    def test_inputs_unchanged(self, unit2):
        topo, mesh = unit2
        X = mesh.reference_coords.copy()
        T = _hot_centre()
        project_on_C(topo, X, T, T0)
        assert np.array_equal(X, mesh.reference_coords) and T[4] == 280.0

    def test_moved_node_is_collinear(self, small_mesh, rng):
        topo, mesh = small_mesh
        X = mesh.reference_coords
        T = T0 + rng.uniform(-5, 5, topo.node_count)
        c, t, front, info = project_on_C(topo, X, T, T0)
        assert is_compatible(topo, t, T0)
        for node, (e, s, old) in info.moves.items():
            a, b = topo.edges[e]
            other = b if a == node else a
            assert 0 <= s <= 1
            assert np.allclose(c[node], old + s * (X[other] - old), atol=1e-14)

    def test_random_fields_become_compatible(self):
        topo, mesh = generate_structured_mesh(8, 8, (0, 0, 1, 1))
        X = mesh.reference_coords
        ok = 0
        for seed in range(20):
            rng = np.random.default_rng(seed)
            T = T0 + rng.uniform(-3, 3, topo.node_count)
            try:
                c, t, _, _ = project_on_C(topo, X, T, T0)
            except ProjectionError:
                continue
            assert is_compatible(topo, t, T0)
            ok += 1
        # white noise is far rougher than any solution field; most still succeed
        assert ok >= 15

    def test_relay_vs_anti(self):
        topo, mesh = generate_structured_mesh(6, 6, (0, 0, 1, 1))
        X = mesh.reference_coords
        prev = T0 + 10 * (X[:, 0] - 0.5)
        c0, t0, f0, _ = project_on_C(topo, X, prev, T0)
        cur = T0 + 10 * (X[:, 0] - 0.6)
        c1, t1, f1, _ = project_on_C(topo, c0, cur, T0, front_prev=f0, temps_prev=t0, mode="relay")
        assert is_compatible(topo, t1, T0)
        assert not inverted_elements(topo, c1).size


class TestRelaxation:
    def test_contraction(self, small_mesh, rng):
        topo, mesh = small_mesh
        X0 = mesh.reference_coords
        Xn = X0 + 0.001 * rng.standard_normal(X0.shape)
        T = rng.uniform(260, 280, len(X0))
        front = FrontState(frozenset({3, 7}))
        t, X = relax_in_C(T, Xn, X0, front)
        assert np.array_equal(t, T)
        mask = np.ones(len(X0), dtype=bool)
        mask[[3, 7]] = False
        assert np.array_equal(X[~mask], Xn[~mask])
        assert np.allclose(X[mask] - X0[mask], 0.9 * (Xn[mask] - X0[mask]), rtol=0, atol=1e-17)

    def test_general_weights(self, unit2):
        _, mesh = unit2
        X0 = mesh.reference_coords
        _, X = relax_in_C(np.zeros(9), X0 + 1.0, X0, FrontState(), keep=0.5, pull=0.25)
        assert np.allclose(X, 0.5 * (X0 + 1.0) + 0.25 * X0)


class TestTopologyChecks:
    def test_inverted(self, unit2):
        topo, mesh = unit2
        c = mesh.reference_coords.copy()
        assert inverted_elements(topo, c).size == 0
        c[4] = (1.2, 1.2)
        assert inverted_elements(topo, c).size > 0

    def test_flat_element_is_not_inverted(self):
        topo, mesh = generate_structured_mesh(1, 1, (0, 0, 1, 1))
        c = mesh.reference_coords.copy()
        c[3] = 0.5 * (c[1] + c[2]) + 1e-18
        assert inverted_elements(topo, c).size == 0

    def test_components(self, unit2):
        topo, _ = unit2
        assert phase_components(topo, _hot_centre(), T0) == (1, 1)
        T = np.full(9, 280.0)
        T[[0, 8]] = 260.0
        assert phase_components(topo, T, T0) == (2, 1)
        assert phase_components(topo, np.full(9, 260.0), T0) == (1, 0)
        assert front_components(topo, FrontState(frozenset({0, 8}))) == 2
        assert front_components(topo, FrontState(frozenset({0, 1, 2}))) == 1
