import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kwising.exactalg.gaussrat import GaussRat, unit_power
from kwising.exactalg.gf2 import bit_list, bits_from, gf2_rank, gf2_solve
from kwising.exactalg.linalg import (
    CapacityError,
    NotASquareError,
    SkewMat,
    SquareMat,
    det,
    pfaffian,
    pfaffian_numeric,
    series_sqrt,
    series_sqrt_residual,
)
from kwising.exactalg.modular import _crt, _primes, _vandermonde_inverse, batched_det_mod
from kwising.exactalg.poly import GPoly, parse_poly, variables

x, y, z = variables("x", "y", "z")
x1, x2 = variables("x1", "x2")
I = GPoly.const(GaussRat(0, 1))

small = st.fractions(min_value=-5, max_value=5, max_denominator=6)
gauss = st.builds(GaussRat, small, small)


@st.composite
def polys(draw, names=("x", "y", "z"), max_terms=4, max_exp=2):
    p = GPoly.zero()
    for _ in range(draw(st.integers(0, max_terms))):
        exps = {v: draw(st.integers(0, max_exp)) for v in names}
        p = p + GPoly.monomial(exps, draw(gauss))
    return p


# --- scalars ---------------------------------------------------------------


def test_gaussrat_parse_forms():
    assert GaussRat.parse("3/4") == GaussRat(Fraction(3, 4))
    assert GaussRat.parse("1/2-3*I") == GaussRat(Fraction(1, 2), -3)
    assert GaussRat.parse("-I") == GaussRat(0, -1)
    assert GaussRat.parse("0.3") == GaussRat(Fraction(3, 10))
    with pytest.raises(ValueError):
        GaussRat.parse("1+2*J")


@given(gauss, gauss)
def test_gaussrat_field(a, b):
    assert a * b == b * a
    assert (a + b) - b == a
    if b:
        assert (a / b) * b == a
    assert complex(a * b) == pytest.approx(complex(a) * complex(b))


def test_unit_powers_cycle():
    assert [unit_power(k) for k in range(5)] == [GaussRat(1), GaussRat(0, 1), GaussRat(-1), GaussRat(0, -1), GaussRat(1)]


# --- polynomials -------------------------------------------------------------


@given(polys(), polys(), polys())
def test_poly_ring_axioms(p, q, r):
    assert p * (q + r) == p * q + p * r
    assert (p * q) * r == p * (q * r)
    assert p - p == GPoly.zero()


@given(polys())
def test_poly_str_roundtrip(p):
    assert parse_poly(str(p)) == p


@given(polys(max_terms=3), polys(max_terms=3))
def test_exact_division(p, q):
    if q.is_zero():
        return
    assert (p * q).exact_div(q) == p


@given(polys(), polys())
def test_square_matches_product(p, q):
    r = p + I * q
    assert r.square() == r * r


@given(polys(max_terms=3), st.dictionaries(st.sampled_from("xyz"), gauss, min_size=3, max_size=3))
def test_substitute_then_evaluate(p, pt):
    assert p.substitute(pt).constant_term() == p.evaluate(pt)


def test_truncate_and_parts():
    p = (1 + x + y) ** 3
    assert p.truncate(1) == 1 + 3 * x + 3 * y
    assert p.homogeneous_part(3) == (x + y) ** 3


# --- GF(2) -------------------------------------------------------------------


def test_gf2_identity_system():
    rows = [1, 2, 4]
    sol, ker = gf2_solve(rows, [1, 0, 1], 3)
    assert sol == 0b101 and ker == []


def test_gf2_underdetermined():
    sol, ker = gf2_solve([0b11], [1], 2)
    assert sol is not None and len(ker) == 1
    assert bin(sol & 0b11).count("1") % 2 == 1


def test_gf2_infeasible():
    sol, _ = gf2_solve([0b1, 0b1], [0, 1], 1)
    assert sol is None


@given(st.lists(st.integers(0, 255), max_size=8))
def test_gf2_kernel_and_rank(rows):
    sol, ker = gf2_solve(rows, [0] * len(rows), 8)
    assert sol is not None
    assert len(ker) == 8 - gf2_rank(rows)
    for k in ker:
        assert all(bin(r & k).count("1") % 2 == 0 for r in rows)


def test_bits_roundtrip():
    assert bit_list(bits_from([0, 3, 7])) == [0, 3, 7]


# --- series square root --------------------------------------------------------


@pytest.mark.parametrize("P, root", [
    (1 + 2 * x + x ** 2, 1 + x),
    ((1 - x1 - x2 - x1 * x2) ** 2, 1 - x1 - x2 - x1 * x2),
    (1 + 2 * x1 + 2 * x2 + x1 ** 2 + 2 * x1 * x2 + x2 ** 2, 1 + x1 + x2),
])
def test_series_sqrt_examples(P, root):
    assert series_sqrt(P, root.total_degree()) == root


def test_series_sqrt_rejects_non_square():
    with pytest.raises(NotASquareError):
        series_sqrt(1 + x, 3)
    _, res = series_sqrt_residual(1 + x, 3)
    assert not res.is_zero()


@given(polys(max_terms=3, max_exp=1))
def test_series_sqrt_of_square(p):
    q = 1 + p - GPoly.const(p.constant_term())
    assert series_sqrt(q * q, q.total_degree()) == q


# --- determinants --------------------------------------------------------------


def test_det_identity():
    assert det(SquareMat.identity(5)) == GPoly.one()


def test_det_fig8_planar_explicit():
    # rows ordered e1, e2, -e1, -e2
    M = SquareMat.from_rows([
        [1 + x1, -x1, 0, -I * x1],
        [-x2, 1 + x2, I * x2, 0],
        [0, I * x1, 1 + x1, -x1],
        [-I * x2, 0, -x2, 1 + x2],
    ])
    want = (1 + x1) ** 2 * (1 + x2) ** 2
    assert det(M) == want
    assert det(M, method="interpolate") == want


def _random_matrix(rng, n, names, density=0.6, deg=1):
    M = SquareMat(n)
    for i in range(n):
        for j in range(n):
            if rng.random() < density:
                p = GPoly.const(GaussRat(rng.randint(-3, 3), rng.randint(-2, 2)))
                for _ in range(rng.randint(0, 2)):
                    exps = {rng.choice(names): rng.randint(1, deg)}
                    p = p + GPoly.monomial(exps, GaussRat(Fraction(rng.randint(-4, 4), rng.randint(1, 3))))
                M[i, j] = p
    return M


def test_det_symbolic_matches_evaluated():
    rng = random.Random(6)
    M = _random_matrix(rng, 6, ["x", "y", "z"])
    D = det(M)
    for _ in range(3):
        pt = {v: GaussRat(Fraction(rng.randint(-5, 5), rng.randint(1, 4)), rng.randint(-2, 2)) for v in "xyz"}
        assert D.evaluate(pt) == det(M, "evaluated", pt)


@given(st.integers(0, 10 ** 6), st.integers(2, 7))
def test_det_bareiss_equals_interpolation(seed, n):
    rng = random.Random(seed)
    M = _random_matrix(rng, n, ["x", "y"], deg=2)
    assert det(M, method="bareiss") == det(M, method="interpolate")


def test_det_truncated_agrees_with_full():
    rng = random.Random(2)
    M = _random_matrix(rng, 5, ["x", "y"])
    for i in range(5):
        M[i, i] = M[i, i] + 1
    assert det(M, "truncated", cutoff=3) == det(M).truncate(3)


def test_det_capacity():
    M = SquareMat(20)
    for i in range(20):
        M[i, (i + 1) % 20] = x
        M[i, i] = GPoly.one() + y
    with pytest.raises(CapacityError):
        det(M, threshold=16)


# --- modular pieces ---------------------------------------------------------------


def test_primes_have_square_root_of_minus_one():
    for p, w in _primes(4):
        assert p % 4 == 1 and p < 2 ** 31
        assert w * w % p == p - 1


def test_crt_signed_recovery():
    ps = [p for p, _ in _primes(3)]
    vals = [-(10 ** 20) + 7, 0, 12345678901234567890]
    res = [[v % p for v in vals] for p in ps]
    assert _crt(res, ps) == vals


@given(st.lists(st.integers(-6, 6), min_size=1, max_size=6, unique=True))
def test_vandermonde_inverse(points):
    W, d = _vandermonde_inverse(tuple(points))
    V = np.array([[Fraction(t) ** k for k in range(len(points))] for t in points], dtype=object)
    prod = W.dot(V)
    assert all(prod[i, j] == (d if i == j else 0) for i in range(len(points)) for j in range(len(points)))


@given(st.integers(0, 10 ** 6))
def test_batched_det_mod(seed):
    rng = np.random.default_rng(seed)
    p = _primes(1)[0][0]
    A = rng.integers(-4, 5, size=(3, 5, 5))
    got = batched_det_mod(A % p, p)
    for k in range(3):
        exact = det(SquareMat.from_rows(A[k].tolist()), "evaluated", {})
        assert int(got[k]) == int(exact.re) % p


# --- Pfaffians -------------------------------------------------------------------------


def test_pfaffian_small():
    a = GPoly.var("a")
    A = SkewMat(2)
    A.add(0, 1, a)
    assert pfaffian(A) == a
    names = {(i, j): GPoly.var(f"a{i + 1}{j + 1}") for i in range(4) for j in range(i + 1, 4)}
    B = SkewMat(4)
    for (i, j), v in names.items():
        B.add(i, j, v)
    n = lambda i, j: names[(i - 1, j - 1)]
    assert pfaffian(B) == n(1, 2) * n(3, 4) - n(1, 3) * n(2, 4) + n(1, 4) * n(2, 3)


def _random_skew(rng, n, density=0.4, symbolic=False):
    A = SkewMat(n)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                c = GaussRat(rng.randint(-3, 3), rng.randint(-1, 1))
                A.add(i, j, GPoly.var(f"w{i}_{j}") * c if symbolic and rng.random() < 0.5 else GPoly.const(c))
    return A


@given(st.integers(0, 10 ** 6), st.integers(1, 4))
def test_pfaffian_squared_is_det(seed, half):
    A = _random_skew(random.Random(seed), 2 * half, symbolic=True)
    assert pfaffian(A) * pfaffian(A) == det(A.to_square())


@given(st.integers(0, 10 ** 6), st.integers(1, 6))
def test_pfaffian_evaluated_matches_symbolic(seed, half):
    rng = random.Random(seed)
    A = _random_skew(rng, 2 * half, density=0.7, symbolic=True)
    pt = {v: GaussRat(rng.randint(-3, 3), rng.randint(-3, 3)) for v in
          {n for p in A.upper.values() for n in p.variables()}}
    assert pfaffian(A).evaluate(pt) == pfaffian(A, "evaluated", pt)


@given(st.integers(0, 10 ** 6), st.integers(1, 8), st.booleans())
def test_pfaffian_numeric(seed, half, cplx):
    rng = random.Random(seed)
    A = _random_skew(rng, 2 * half, density=0.8)
    exact = complex(pfaffian(A, "evaluated", {}))
    M = A.evaluate_complex({})
    if not cplx:
        M = M.real
        exact = exact.real
        if any(p.im for p in A.upper.values()):
            return
    got = pfaffian_numeric(M)
    assert abs(got - exact) <= 1e-9 * max(1.0, abs(exact))
