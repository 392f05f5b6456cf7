from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import fig8_planar, fig8_torus, k4, path_graph, small_random_map, triangle
from kwising.combmap import CombMap, homology_basis, homology_class
from kwising.exactalg.linalg import CapacityError
from kwising.exactalg.poly import GPoly, variables
from kwising.fisher import (
    blowup,
    cycle_to_matching,
    is_perfect_matching,
    matching_to_cycle,
    perfect_matchings,
    z_dimer,
    z_dimer_by_class,
)
from kwising.ising import even_subgraphs, z_ising, z_ising_by_class, z_ising_partial, z_twisted
from kwising.quadform import QuadForm2

x, x1, x2 = variables("x", "x1", "x2")
FIG8_Z = 1 + x1 + x2 + x1 * x2


# --- brute-force Ising sums -----------------------------------------------------


def test_z_ising_examples():
    assert z_ising(fig8_planar()) == FIG8_Z
    assert z_ising(fig8_torus()) == FIG8_Z
    assert z_ising(path_graph(6)) == GPoly.one()
    assert z_ising(k4()) == 1 + 4 * x ** 3 + 3 * x ** 4


def test_z_ising_constant_weights():
    # few distinct weights take the edge-count histogram path
    m = k4("1/2")
    h = Fraction(1, 2)
    assert z_ising(m) == GPoly.const(1 + 4 * h ** 3 + 3 * h ** 4)


def test_brute_force_cap():
    with pytest.raises(CapacityError):
        even_subgraphs(k4(), cap=2)


def test_partials_torus():
    m = fig8_torus()
    hb = homology_basis(m)
    i1 = homology_class(hb, 0b01)
    assert z_ising_partial(m, hb, 0) == GPoly.one()
    assert z_ising_partial(m, hb, i1) == x1
    planar = k4()
    assert z_ising_partial(planar, homology_basis(planar), 0) == z_ising(planar)


def test_twisted_torus():
    m = fig8_torus()
    hb = homology_basis(m)
    assert z_twisted(m, hb, QuadForm2.make(0, hb.intersection)) == 1 + x1 + x2 - x1 * x2
    assert z_twisted(m, hb, QuadForm2.make(0b11, hb.intersection)) == 1 - x1 - x2 - x1 * x2
    planar = k4()
    assert z_twisted(planar, homology_basis(planar), QuadForm2.make(0, [])) == z_ising(planar)


@given(st.integers(0, 10 ** 6))
def test_partials_sum_to_total(seed):
    m = small_random_map(seed)
    parts = z_ising_by_class(m, homology_basis(m))
    total = GPoly.zero()
    for p in parts.values():
        total = total + p
    assert total == z_ising(m)


# --- Fisher graph ------------------------------------------------------------------


def test_blowup_sizes():
    star = CombMap([[0, 2, 4], [1], [3], [5]])
    F = blowup(star)
    assert len(F.cluster_a[0]) + len(F.cluster_b[0]) == 6
    assert len(F.internal_edges[0]) == 7
    for m in (star, triangle(), fig8_torus(), k4()):
        F = blowup(m)
        assert F.gamma.n_vertices == 4 * m.n_edges
        assert F.gamma.genus == m.genus


def test_k2_matching_problem():
    k2 = CombMap([[0], [1]], ["xe"])
    total = GPoly.zero()
    for M in perfect_matchings(k2):
        total = total + k2.chain_weight(M)
    assert total == GPoly.var("xe")


def test_cycle_to_matching_examples():
    F = blowup(fig8_planar())
    assert cycle_to_matching(F, 0) == F.m0
    M = cycle_to_matching(F, 0b01)
    assert is_perfect_matching(F.gamma, M)
    assert matching_to_cycle(F, M) == 0b01
    T = blowup(triangle())
    M = cycle_to_matching(T, 0b111)
    assert matching_to_cycle(T, M) == 0b111
    # the external edge of every G-edge is used; it is the only matching over the triangle
    assert sum(1 for N in perfect_matchings(T.gamma) if matching_to_cycle(T, N) == 0b111) == 1


@given(st.integers(0, 10 ** 6))
def test_matchings_biject_with_even_subgraphs(seed):
    m = small_random_map(seed, max_edges=5)
    F = blowup(m)
    seen = set()
    for M in perfect_matchings(F.gamma):
        xi = matching_to_cycle(F, M)
        assert m.is_even(xi) and xi not in seen
        assert cycle_to_matching(F, xi) == M
        seen.add(xi)
    assert len(seen) == len(even_subgraphs(m))


def test_z_dimer_examples():
    assert z_dimer(blowup(fig8_planar())) == FIG8_Z
    m = fig8_torus()
    hb = homology_basis(m)
    F = blowup(m)
    assert z_dimer(F, (hb, 0b11)) == x1 * x2
    assert z_dimer_by_class(F, hb) == z_ising_by_class(m, hb)


@given(st.integers(0, 10 ** 6))
def test_dimer_equals_ising(seed):
    m = small_random_map(seed)
    hb = homology_basis(m)
    F = blowup(m)
    assert z_dimer(F) == z_ising(m)
    assert z_dimer_by_class(F, hb) == z_ising_by_class(m, hb)
