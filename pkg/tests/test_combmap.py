import pytest
from hypothesis import given, strategies as st

from conftest import fig8_planar, fig8_torus, genus2_rose, path_graph, small_random_map, triangle
from kwising.combmap import (
    ChainError,
    CombMap,
    MapError,
    cycle_decompose,
    face_chain,
    homology_basis,
    homology_class,
    intersect_mod2,
    intersection_form,
    trace_faces,
)
from kwising.quadform import NotQuadraticError, QuadForm2, all_refinements, arf, standard_symplectic


@pytest.mark.parametrize("m, n_faces, genus", [
    (fig8_planar(), 3, 0),
    (fig8_torus(), 1, 1),
    (CombMap([[0], [1]]), 1, 0),
    (genus2_rose(), 1, 2),
])
def test_trace_faces(m, n_faces, genus):
    faces, g = trace_faces(m)
    assert (len(faces), g) == (n_faces, genus)
    # faces partition the half-edges
    assert sorted(h for f in faces for h in f) == list(range(m.n_half_edges))


def test_bad_rotations_rejected():
    with pytest.raises(MapError):
        CombMap([[0, 1, 2]])
    with pytest.raises(MapError):
        CombMap([[0, 1], [1]])


def test_homology_basis_planar_is_empty():
    hb = homology_basis(fig8_planar())
    assert hb.basis == [] and hb.intersection == []


def test_homology_basis_torus():
    hb = homology_basis(fig8_torus())
    assert sorted(hb.basis) == [0b01, 0b10]
    assert hb.intersection == [[0, 1], [1, 0]]
    e1 = hb.basis.index(0b01)
    assert homology_class(hb, 0b01) == 1 << e1
    assert homology_class(hb, 0b11) == 0b11


def test_homology_basis_genus2():
    hb = homology_basis(genus2_rose())
    assert hb.rank == 4
    assert arf(QuadForm2.make(0, hb.intersection)) in (0, 1)   # nondegenerate pairing


def test_face_boundaries_are_null():
    m = genus2_rose()
    hb = homology_basis(m)
    for f in m.faces():
        assert homology_class(hb, face_chain(f)) == 0


def test_homology_class_rejects_odd_chain():
    with pytest.raises(ChainError):
        homology_class(homology_basis(triangle()), 0b1)


def test_cycle_decompose_examples():
    assert cycle_decompose(triangle(), 0) == []
    assert cycle_decompose(triangle(), 0b111) == [0b111]
    # two triangles glued at vertex 0: edges 0-1,1-2,2-0 and 0-3,3-4,4-0
    bow = CombMap([[0, 5, 6, 11], [1, 2], [3, 4], [7, 8], [9, 10]])
    parts = cycle_decompose(bow, bow.all_edges())
    assert sorted(parts) == [0b000111, 0b111000]


def test_intersect_mod2_examples():
    assert intersect_mod2(fig8_torus(), 0b01, 0b10) == 1
    assert intersect_mod2(fig8_planar(), 0b01, 0b10) == 0
    square_pair = CombMap([[0, 5], [1, 2], [3, 4], [6, 11], [7, 8], [9, 10]])
    assert intersect_mod2(square_pair, 0b000111, 0b111000) == 0


@given(st.integers(0, 10 ** 6))
def test_random_map_homology(seed):
    m = small_random_map(seed, max_edges=7)
    faces, g = trace_faces(m)
    assert m.n_vertices - m.n_edges + len(faces) == 2 - 2 * g
    hb = homology_basis(m)
    assert hb.rank == 2 * g
    # the intersection pairing is symmetric, alternating and nondegenerate
    n = hb.rank
    for i in range(n):
        assert hb.intersection[i][i] == 0
        for j in range(n):
            assert hb.intersection[i][j] == hb.intersection[j][i]
    if n:
        assert arf(QuadForm2.make(0, hb.intersection)) in (0, 1)
    for k, b in enumerate(hb.basis):
        assert homology_class(hb, b) == 1 << k
    # basis cycles are simple, so the direct crossing count applies to edge-disjoint pairs
    for i, a in enumerate(hb.basis):
        for j, b in enumerate(hb.basis):
            if i != j and not a & b:
                assert intersect_mod2(m, a, b) == hb.intersection[i][j]


def test_tree_has_trivial_homology():
    m = path_graph(5)
    assert m.genus == 0 and homology_basis(m).rank == 0


# --- quadratic forms ----------------------------------------------------------


def test_arf_examples():
    assert arf(QuadForm2.make(0, [])) == 0
    J = standard_symplectic(1)
    arfs = {q.basis_values().__repr__(): arf(q) for q in all_refinements(J)}
    assert arfs == {"[0, 0]": 0, "[1, 0]": 0, "[0, 1]": 0, "[1, 1]": 1}


@pytest.mark.parametrize("g", [1, 2, 3])
def test_even_form_count(g):
    forms = all_refinements(standard_symplectic(g))
    assert len(forms) == 4 ** g
    assert sum(1 - arf(q) for q in forms) == 2 ** (g - 1) * (2 ** g + 1)


@given(st.integers(0, 63), st.integers(0, 63), st.integers(0, 63))
def test_form_is_quadratic(v, a, b):
    J = standard_symplectic(3)
    q = QuadForm2.make(v, J)
    dot = bin(a & (((b & 0b010101) << 1) | ((b & 0b101010) >> 1))).count("1") % 2
    assert q(a ^ b) ^ q(a) ^ q(b) == dot
    assert q(0) == 0


def test_degenerate_pairing_has_no_arf():
    with pytest.raises(NotQuadraticError):
        arf(QuadForm2.make(0, [[0, 0], [0, 0]]))
