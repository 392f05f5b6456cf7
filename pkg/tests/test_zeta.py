from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import fig8_planar, fig8_torus, path_graph
from kwising.combmap import CombMap
from kwising.exactalg.gaussrat import GaussRat
from kwising.exactalg.linalg import CapacityError
from kwising.exactalg.poly import GPoly, variables
from kwising.kacward import kw_det_sqrt, kw_matrix, setup
from kwising.zeta import (
    ClosedPath,
    _euler_product,
    canonical,
    is_primitive,
    least_rotation,
    prime_reduced_paths,
    verify_bass,
)

x1, x2 = variables("x1", "x2")


def test_word_helpers():
    assert least_rotation((3, 1, 2)) == (1, 2, 3)
    assert is_primitive((0, 2)) and not is_primitive((0, 2, 0, 2))
    # reversal of e1 e2 is e2^-1 e1^-1
    assert canonical((0, 2)) == canonical((3, 1))
    assert ClosedPath((0, 3)).label() == "e1*e2^-1"


def test_fig8_paths_length_two():
    labels = [p.label() for p in prime_reduced_paths(fig8_planar(), 2)]
    assert labels == ["e1", "e2", "e1*e2", "e1*e2^-1"]


def test_no_powers_or_backtracking():
    words = {p.halfedges for p in prime_reduced_paths(fig8_torus(), 4, oriented=True)}
    assert (0, 0) not in words          # e1 e1 is a power
    assert all(w[k] ^ 1 != w[(k + 1) % len(w)] for w in words for k in range(len(w)))


def test_tree_has_no_paths():
    assert prime_reduced_paths(path_graph(5), 6) == []


def test_path_cap():
    with pytest.raises(CapacityError):
        prime_reduced_paths(fig8_planar(), 11)


@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(0, 2), st.integers(0, 2)).filter(lambda t: t[1] + t[2] > 0),
                max_size=6),
       st.integers(1, 5))
def test_euler_product_matches_direct(terms, L):
    ws = [GPoly.monomial({"x1": a, "x2": b}, GaussRat(c)) for c, a, b in terms if c]
    direct = GPoly.one()
    for w in ws:
        direct = direct.mul(GPoly.one() - w, cutoff=L)
    assert _euler_product(ws, L) == direct


def test_euler_product_with_constants():
    half = GPoly.const(GaussRat(Fraction(1, 2)))
    assert _euler_product([half + x1], 2) == half - x1


@pytest.mark.parametrize("cls", range(4))
def test_bass_torus_fig8(cls):
    ks = setup(fig8_torus())
    r = verify_bass(ks.F, ks.classes[cls].K, 6)
    assert r.ok and r.signs_ok


def test_bass_tree():
    ks = setup(path_graph(4))
    r = verify_bass(ks.F, ks.classes[0].K, 4)
    assert r.ok and r.lhs == GPoly.one() and r.rhs == GPoly.one()


def test_signs_match_square_root():
    ks = setup(fig8_torus())
    odd = [c for c in ks.classes if c.arf][0]
    r = verify_bass(ks.F, odd.K, 4)
    root = kw_det_sqrt(kw_matrix(ks.F, odd.K))
    # e1 has sign +1 and the root's x1 coefficient is -eps_1 = -1
    assert r.signs["e1"] == 1
    assert root.coefficient({"x1": 1}) == -1
    assert set(r.signs.values()) <= {1, -1}
