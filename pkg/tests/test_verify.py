import copy
import dataclasses
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import fig8_planar, fig8_torus, genus2_rose, k4, path_graph, small_random_map
from kwising.exactalg.linalg import CapacityError
from kwising.generators import grid_graph, torus_lattice
from kwising.kacward import setup
from kwising.kasteleyn import is_kasteleyn
from kwising.verify import FAIL, PASS, SKIP, VerifyConfig, _Suite, all_passed, bass_length, random_point, run_checks

QUICK = ["kasteleyn", "forms", "quadratic", "eps_m0", "cluster_pfaffian", "three_way"]
FULL = QUICK + ["perfect_square", "prop47", "refined_equality", "linear_relation",
                "twisted_root", "bass", "geometric"]


def statuses(checks):
    return {c.name: c.status for c in checks}


def test_quick_check_names():
    assert [c.name for c in run_checks(fig8_torus())] == QUICK


@pytest.mark.parametrize("m", [fig8_planar(), fig8_torus(), genus2_rose(), path_graph(3)])
def test_full_passes_on_small_maps(m):
    st_ = statuses(run_checks(m, VerifyConfig(level="full")))
    assert list(st_) == FULL
    assert all(v == PASS for k, v in st_.items() if k != "geometric")
    assert st_["geometric"] == SKIP


def test_geometric_runs_with_coordinates():
    st_ = statuses(run_checks(grid_graph(2, 3), VerifyConfig(level="full")))
    assert st_["geometric"] == PASS and FAIL not in st_.values()


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6))
def test_quick_passes_on_random_maps(seed):
    assert all_passed(run_checks(small_random_map(seed, max_edges=6), VerifyConfig(seed=seed)))


def test_corrupted_orientation_is_caught():
    ks = copy.deepcopy(setup(k4()))
    c = ks.classes[0]
    gamma = ks.F.gamma
    internal = {e for ids in ks.F.internal_edges for e in ids}
    # flip an external edge whose two sides lie on different faces
    e = next(e for e in range(gamma.n_edges)
             if e not in internal and not is_kasteleyn(gamma, c.K.bits ^ (1 << e)))
    ks.classes[0] = dataclasses.replace(c, K=dataclasses.replace(c.K, bits=c.K.bits ^ (1 << e)))
    checks = run_checks(k4(), ks=ks)
    assert statuses(checks)["kasteleyn"] == FAIL
    assert not all_passed(checks)


def test_suite_maps_exceptions_to_status():
    s = _Suite(k4(), VerifyConfig())

    def cap():
        raise CapacityError("too big")

    def bad():
        raise AssertionError("nope")

    s.run("a", lambda: "fine")
    s.run("b", cap)
    s.run("c", bad)
    assert [(c.status, c.detail) for c in s.checks] == [(PASS, "fine"), (SKIP, "too big"), (FAIL, "nope")]


def test_numeric_three_way_on_larger_map():
    # brute force is out of reach, so the three methods are compared at points
    G = torus_lattice(3, "x")
    checks = run_checks(G, VerifyConfig(brute_cap=2 ** 10, n_points=2))
    assert statuses(checks)["three_way"] == PASS


def test_random_point_is_seeded():
    a = random_point(["x1", "x2"], random.Random(3))
    b = random_point(["x1", "x2"], random.Random(3))
    assert a == b and list(a) == ["x1", "x2"]
    assert all(v.im == 0 for v in random_point(["x"], random.Random(1), complex_parts=False).values())


def test_bass_length_budget():
    G = setup(torus_lattice(3, "x")).H
    assert bass_length(G, 8, 10 ** 9) == 8
    assert 2 <= bass_length(G, 8, 50) < 8
    assert bass_length(path_graph(4), 6, 1) == 6
