import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import fig8_planar, fig8_torus, genus2_rose, k4, path_graph, small_random_map
from kwising.combmap import CombMap, cycle_decompose, homology_basis, oriented_cycle
from kwising.exactalg.gaussrat import GaussRat
from kwising.exactalg.linalg import pfaffian
from kwising.exactalg.poly import GPoly, variables
from kwising.fisher import blowup, perfect_matchings
from kwising.generators import torus_lattice
from kwising.ising import z_ising, z_twisted
from kwising.kasteleyn import (
    NoKasteleynError,
    cluster_block,
    enumerate_classes,
    eps_sign,
    find_kasteleyn,
    find_kasteleyn_map,
    is_kasteleyn,
    kasteleyn_matrix,
    n_disagree,
    quad_form,
    spin_classes,
    z_dimer_numeric,
    z_dimer_pfaffian,
)
from kwising.quadform import arf

x1, x2 = variables("x1", "x2")
FIG8_Z = 1 + x1 + x2 + x1 * x2


def test_find_kasteleyn_planar_fig8():
    F = blowup(fig8_planar())
    K = find_kasteleyn(F)
    assert is_kasteleyn(F.gamma, K.bits)


def test_find_kasteleyn_small_cases():
    assert is_kasteleyn(CombMap([[0], [1]]), find_kasteleyn_map(CombMap([[0], [1]])))
    with pytest.raises(NoKasteleynError):
        find_kasteleyn_map(path_graph(3))


@pytest.mark.parametrize("m, n", [(fig8_planar(), 1), (fig8_torus(), 4), (genus2_rose(), 16)])
def test_class_counts(m, n):
    F = blowup(m)
    classes = enumerate_classes(F)
    assert len(classes) == n
    assert len({K.class_id for K in classes}) == n
    for K in classes:
        assert is_kasteleyn(F.gamma, K.bits)


def test_kasteleyn_matrix_is_skew():
    F = blowup(fig8_torus())
    A = kasteleyn_matrix(F, find_kasteleyn(F)).to_square()
    for (i, j), p in A.entries.items():
        assert A[j, i] == -p


@pytest.mark.parametrize("n", range(1, 9))
def test_cluster_pfaffian_is_one(n):
    assert pfaffian(cluster_block(n)) == GPoly.one()


def test_eps_m0_and_relabelling():
    F = blowup(fig8_torus())
    for c in spin_classes(F):
        assert c.eps_m0 == 1
    K = find_kasteleyn(F)
    labels = list(range(F.gamma.n_vertices))
    labels[0], labels[1] = labels[1], labels[0]
    assert eps_sign(F, K, F.m0, labels) == -eps_sign(F, K, F.m0)


@given(st.integers(0, 10 ** 6))
def test_sign_of_matching_from_cycles(seed):
    m = small_random_map(seed, max_edges=4)
    F = blowup(m)
    for c in spin_classes(F):
        base = eps_sign(F, c.K, F.m0)
        for M in perfect_matchings(F.gamma):
            want = 1
            for C in cycle_decompose(F.gamma, M ^ F.m0):
                if n_disagree(c.K.bits, oriented_cycle(F.gamma, C)) % 2 == 0:
                    want = -want
            assert eps_sign(F, c.K, M) * base == want


def test_torus_forms_and_arf():
    m = fig8_torus()
    hb = homology_basis(m)
    classes = spin_classes(blowup(m), hb)
    assert sorted(c.q.values for c in classes) == [0, 1, 2, 3]
    assert [c.arf for c in classes] == [0, 0, 0, 1]
    # each class's signed Pfaffian is the sum twisted by its form
    for c in classes:
        assert c.eps_m0 * pfaffian(c.matrix) == z_twisted(m, hb, c.q)
    odd = classes[3]
    assert odd.eps_m0 * pfaffian(odd.matrix) == 1 - x1 - x2 - x1 * x2


@given(st.integers(0, 10 ** 6))
def test_quad_form_is_refinement(seed):
    m = small_random_map(seed, max_edges=6)
    hb = homology_basis(m)
    F = blowup(m)
    for K in enumerate_classes(F, None, hb):
        q = quad_form(F, K, hb)
        assert q(0) == 0
        arf(q)   # raises unless q refines a nondegenerate pairing


def test_planar_single_pfaffian():
    F = blowup(fig8_planar())
    (c,) = spin_classes(F)
    assert c.eps_m0 * pfaffian(c.matrix) == FIG8_Z


@pytest.mark.parametrize("m", [fig8_planar(), fig8_torus(), path_graph(4), k4()])
def test_z_dimer_pfaffian_examples(m):
    assert z_dimer_pfaffian(blowup(m)) == z_ising(m)


@given(st.integers(0, 10 ** 6))
def test_pfaffian_formula_random(seed):
    m = small_random_map(seed, max_edges=6)
    assert z_dimer_pfaffian(blowup(m)) == z_ising(m)


@given(st.integers(0, 10 ** 6))
def test_numeric_pfaffian_sum(seed):
    rng = random.Random(seed)
    m = small_random_map(seed, max_edges=7)
    F = blowup(m)
    classes = spin_classes(F)
    pt = {v: GaussRat(Fraction(rng.randint(-9, 9), 10), Fraction(rng.randint(-9, 9), 10))
          for v in m.weight_variables()}
    exact = complex(z_dimer_pfaffian(F, "evaluated", pt, classes))
    got = z_dimer_numeric(F, classes, {k: complex(v) for k, v in pt.items()})
    assert abs(got - exact) <= 1e-9 * max(1.0, abs(exact))


@pytest.mark.parametrize("N", [2, 3, 4])
def test_numeric_torus_against_brute_force(N):
    G = torus_lattice(N, "3/10")
    F = blowup(G)
    exact = float(z_ising(G).constant_term().re)
    assert z_dimer_numeric(F, spin_classes(F), {}).real == pytest.approx(exact, rel=1e-12)
