"""Determinants, Pfaffians and power-series square roots over GPoly / GaussRat."""

from __future__ import annotations

from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .gaussrat import GaussRat
from .poly import GPoly, mono_degree

SYMBOLIC_DET_THRESHOLD = 16


class CapacityError(RuntimeError):
    """A symbolic computation was refused because the input is too large."""


class NotASquareError(ArithmeticError):
    pass


class SquareMat:
    """Sparse square matrix with GPoly entries."""

    def __init__(self, size: int, entries: Optional[Mapping[Tuple[int, int], object]] = None):
        self.size = size
        self.entries: Dict[Tuple[int, int], GPoly] = {}
        for (i, j), v in (entries or {}).items():
            self[i, j] = v

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[object]]) -> "SquareMat":
        n = len(rows)
        m = cls(n)
        for i, row in enumerate(rows):
            if len(row) != n:
                raise ValueError("matrix is not square")
            for j, v in enumerate(row):
                m[i, j] = v
        return m

    @classmethod
    def identity(cls, n: int) -> "SquareMat":
        return cls(n, {(i, i): 1 for i in range(n)})

    def __getitem__(self, ij) -> GPoly:
        return self.entries.get(ij, GPoly.zero())

    def __setitem__(self, ij, value) -> None:
        i, j = ij
        if not (0 <= i < self.size and 0 <= j < self.size):
            raise IndexError(ij)
        p = GPoly.lift(value)
        if p.is_zero():
            self.entries.pop(ij, None)
        else:
            self.entries[ij] = p

    def rows(self) -> List[List[GPoly]]:
        return [[self[i, j] for j in range(self.size)] for i in range(self.size)]

    def substitute(self, values: Mapping[str, object]) -> "SquareMat":
        return SquareMat(self.size, {ij: p.substitute(values) for ij, p in self.entries.items()})

    def evaluate(self, point: Mapping[str, object]) -> List[List[GaussRat]]:
        out = [[GaussRat(0)] * self.size for _ in range(self.size)]
        for (i, j), p in self.entries.items():
            out[i][j] = p.evaluate(point)
        return out

    def evaluate_complex(self, point: Mapping[str, complex]):
        import numpy as np

        out = np.zeros((self.size, self.size), dtype=complex)
        for (i, j), p in self.entries.items():
            out[i, j] = p.evaluate_complex(point)
        return out

    def __eq__(self, other):
        return isinstance(other, SquareMat) and self.size == other.size and self.entries == other.entries


class SkewMat:
    """Skew-symmetric matrix; only entries above the diagonal are stored."""

    def __init__(self, size: int):
        self.size = size
        self.upper: Dict[Tuple[int, int], GPoly] = {}

    def add(self, i: int, j: int, value) -> None:
        """Add ``value`` at (i, j) and ``-value`` at (j, i)."""
        if i == j:
            raise ValueError("skew matrices have zero diagonal")
        p = GPoly.lift(value)
        if i > j:
            i, j, p = j, i, -p
        s = self.upper.get((i, j), GPoly.zero()) + p
        if s.is_zero():
            self.upper.pop((i, j), None)
        else:
            self.upper[(i, j)] = s

    def __getitem__(self, ij) -> GPoly:
        i, j = ij
        if i == j:
            return GPoly.zero()
        if i < j:
            return self.upper.get((i, j), GPoly.zero())
        return -self.upper.get((j, i), GPoly.zero())

    def to_square(self) -> SquareMat:
        m = SquareMat(self.size)
        for (i, j), p in self.upper.items():
            m[i, j] = p
            m[j, i] = -p
        return m

    def substitute(self, values: Mapping[str, object]) -> "SkewMat":
        out = SkewMat(self.size)
        for (i, j), p in self.upper.items():
            out.add(i, j, p.substitute(values))
        return out

    def submatrix(self, idx: Sequence[int]) -> "SkewMat":
        pos = {v: k for k, v in enumerate(idx)}
        out = SkewMat(len(idx))
        for (i, j), p in self.upper.items():
            if i in pos and j in pos:
                out.add(pos[i], pos[j], p)
        return out

    def evaluate(self, point: Mapping[str, object]) -> List[List[GaussRat]]:
        out = [[GaussRat(0)] * self.size for _ in range(self.size)]
        for (i, j), p in self.upper.items():
            v = p.evaluate(point)
            out[i][j] = v
            out[j][i] = -v
        return out

    def evaluate_complex(self, point: Mapping[str, complex]):
        import numpy as np

        out = np.zeros((self.size, self.size), dtype=complex)
        for (i, j), p in self.upper.items():
            v = p.evaluate_complex(point)
            out[i, j] = v
            out[j, i] = -v
        return out


# ---------------------------------------------------------------------------
# determinants


def det(M: SquareMat, mode: str = "symbolic", point=None, cutoff: Optional[int] = None,
        threshold: int = SYMBOLIC_DET_THRESHOLD, method: str = "auto"):
    """Determinant of ``M``.

    ``mode="symbolic"`` returns a GPoly (fraction-free elimination);
    ``mode="evaluated"`` substitutes ``point`` and returns a GaussRat;
    ``mode="truncated"`` returns the determinant modulo total degree > cutoff.

    Symbolic ``method`` is ``"bareiss"``, ``"interpolate"`` (exact multi-modular
    evaluation and interpolation) or ``"auto"`` (Bareiss below size 7).
    """
    if mode == "symbolic":
        if method == "bareiss":
            return _det_bareiss(M, threshold)
        order, entries = _strip_unit_rows(M)
        if len(order) > threshold:
            raise CapacityError(
                f"symbolic determinant of effective size {len(order)} exceeds threshold {threshold}; "
                "use evaluated mode"
            )
        if method == "auto" and len(order) < 7:
            return _det_bareiss(M, threshold)
        from .modular import det_interpolated

        try:
            return det_interpolated(len(order), entries)
        except OverflowError:
            if method == "interpolate":
                raise
            return _det_bareiss(M, threshold)
    if mode == "evaluated":
        if point is None:
            raise ValueError("evaluated mode needs a point")
        return det_field(M.evaluate(point))
    if mode == "truncated":
        if cutoff is None:
            raise ValueError("truncated mode needs a cutoff")
        return _det_truncated(M, cutoff)
    raise ValueError(f"unknown mode {mode!r}")


def _strip_unit_rows(M: SquareMat) -> Tuple[List[int], Dict[Tuple[int, int], GPoly]]:
    # a row (or column) equal to e_i contributes a factor 1 and can be removed
    entries = dict(M.entries)
    alive = set(range(M.size))
    one = GPoly.one()
    changed = True
    while changed:
        changed = False
        row_nz: Dict[int, List[int]] = {i: [] for i in alive}
        col_nz: Dict[int, List[int]] = {i: [] for i in alive}
        for (i, j) in entries:
            row_nz[i].append(j)
            col_nz[j].append(i)
        for i in sorted(alive):
            if (row_nz[i] == [i] or col_nz[i] == [i]) and entries.get((i, i)) == one:
                alive.discard(i)
                entries = {ij: p for ij, p in entries.items() if i not in ij}
                changed = True
                break
    order = sorted(alive)
    pos = {v: k for k, v in enumerate(order)}
    return order, {(pos[i], pos[j]): p for (i, j), p in entries.items()}


def _det_bareiss(M: SquareMat, threshold: int) -> GPoly:
    order, entries = _strip_unit_rows(M)
    n = len(order)
    if n > threshold:
        raise CapacityError(
            f"symbolic determinant of effective size {n} exceeds threshold {threshold}; "
            "use evaluated mode"
        )
    if n == 0:
        return GPoly.one()
    a = [[entries.get((i, j), GPoly.zero()) for j in range(n)] for i in range(n)]
    sign = 1
    prev = GPoly.one()
    for k in range(n - 1):
        best = None
        for i in range(k, n):
            for j in range(k, n):
                p = a[i][j]
                if not p.is_zero():
                    cost = p.nterms()
                    if best is None or cost < best[0]:
                        best = (cost, i, j)
        if best is None:
            return GPoly.zero()
        _, pi, pj = best
        if pi != k:
            a[k], a[pi] = a[pi], a[k]
            sign = -sign
        if pj != k:
            for row in a:
                row[k], row[pj] = row[pj], row[k]
            sign = -sign
        piv = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            for j in range(k + 1, n):
                akj = a[k][j]
                num = piv * a[i][j]
                if not aik.is_zero() and not akj.is_zero():
                    num = num - aik * akj
                a[i][j] = num.exact_div(prev) if not num.is_zero() else num
            a[i][k] = GPoly.zero()
        prev = piv
    out = a[n - 1][n - 1]
    return out if sign > 0 else -out


def det_field(rows: Sequence[Sequence[object]]) -> GaussRat:
    """Exact determinant of a GaussRat matrix by Gaussian elimination."""
    a = [[GaussRat.coerce(x) for x in row] for row in rows]
    n = len(a)
    result = GaussRat(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k]), None)
        if piv is None:
            return GaussRat(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            result = -result
        p = a[k][k]
        result = result * p
        inv = p.inverse()
        rowk = a[k]
        for i in range(k + 1, n):
            if a[i][k]:
                f = a[i][k] * inv
                rowi = a[i]
                for j in range(k + 1, n):
                    if rowk[j]:
                        rowi[j] = rowi[j] - f * rowk[j]
                rowi[k] = GaussRat(0)
    return result


def series_inverse(p: GPoly, cutoff: int) -> GPoly:
    """Inverse of ``p`` (nonzero constant term) modulo total degree > cutoff."""
    c = p.constant_term()
    if not c:
        raise ZeroDivisionError("series inverse needs a nonzero constant term")
    cinv = c.inverse()
    nil = GPoly.one() - p.scale(cinv)  # p = c (1 - nil)
    out = GPoly.one()
    power = GPoly.one()
    for _ in range(cutoff):
        power = power.mul(nil, cutoff)
        if power.is_zero():
            break
        out = out + power
    return out.scale(cinv)


def _det_truncated(M: SquareMat, cutoff: int) -> GPoly:
    order, entries = _strip_unit_rows(M)
    n = len(order)
    a = [[entries.get((i, j), GPoly.zero()).truncate(cutoff) for j in range(n)] for i in range(n)]
    result = GPoly.one()
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k].constant_term()), None)
        if piv is None:
            raise ArithmeticError("truncated elimination needs an invertible constant part")
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            result = -result
        p = a[k][k]
        result = result.mul(p, cutoff)
        inv = series_inverse(p, cutoff)
        for i in range(k + 1, n):
            if a[i][k].is_zero():
                continue
            f = a[i][k].mul(inv, cutoff)
            for j in range(k + 1, n):
                if not a[k][j].is_zero():
                    a[i][j] = a[i][j] - f.mul(a[k][j], cutoff)
            a[i][k] = GPoly.zero()
    return result


# ---------------------------------------------------------------------------
# Pfaffians


def pfaffian(A: SkewMat, mode: str = "symbolic", point=None):
    """Pfaffian of a skew-symmetric matrix.

    Symbolic mode sums signed weights over the perfect matchings of the
    sparsity pattern; evaluated mode uses skew Gaussian elimination.
    """
    if A.size % 2:
        raise ValueError("Pfaffian of an odd-size matrix")
    if mode == "symbolic":
        return _pf_matchings(A)
    if mode == "evaluated":
        if point is None:
            raise ValueError("evaluated mode needs a point")
        return pfaffian_field(A.evaluate(point))
    raise ValueError(f"unknown mode {mode!r}")


def _pf_matchings(A: SkewMat) -> GPoly:
    n = A.size
    nbrs: Dict[int, Dict[int, GPoly]] = {i: {} for i in range(n)}
    for (i, j), p in A.upper.items():
        nbrs[i][j] = p
        nbrs[j][i] = -p
    total = [GPoly.zero()]

    # expansion along the lowest free index; sign of pairing (i, j) with i the
    # smallest free index is (-1)^(number of free indices strictly between)
    def rec(free: List[int], acc: GPoly) -> None:
        if not free:
            total[0] = total[0] + acc
            return
        free_set = set(free)
        for v in free:
            if not any(u in free_set for u in nbrs[v]):
                return
        i = free[0]
        rest = free[1:]
        for pos, j in enumerate(rest):
            p = nbrs[i].get(j)
            if p is None:
                continue
            term = acc * p
            if pos % 2:
                term = -term
            rec(rest[:pos] + rest[pos + 1:], term)

    rec(list(range(n)), GPoly.one())
    return total[0]


def pfaffian_field(rows: Sequence[Sequence[object]]) -> GaussRat:
    """Exact Pfaffian of a GaussRat skew matrix by skew elimination.

    After pivoting, Pf(A) = a[k][k+1] * Pf(S) with the Schur complement
    S_ij = a_ij + (a_ik a_{k+1,j} - a_{i,k+1} a_kj) / a[k][k+1].
    """
    a = [[GaussRat.coerce(x) for x in row] for row in rows]
    n = len(a)
    if n % 2:
        raise ValueError("Pfaffian of an odd-size matrix")
    result = GaussRat(1)
    for k in range(0, n, 2):
        piv = next((j for j in range(k + 1, n) if a[k][j]), None)
        if piv is None:
            return GaussRat(0)
        if piv != k + 1:
            _swap_sym(a, k + 1, piv)
            result = -result
        p = a[k][k + 1]
        result = result * p
        inv = p.inverse()
        rk, rk1 = a[k], a[k + 1]
        for i in range(k + 2, n):
            u, w = a[i][k], a[i][k + 1]
            if not u and not w:
                continue
            ri = a[i]
            for j in range(i + 1, n):
                t = GaussRat(0)
                if u and rk1[j]:
                    t = t + u * rk1[j]
                if w and rk[j]:
                    t = t - w * rk[j]
                if t:
                    ri[j] = ri[j] + t * inv
                    a[j][i] = -ri[j]
    return result


def _swap_sym(a, r, s) -> None:
    a[r], a[s] = a[s], a[r]
    for row in a:
        row[r], row[s] = row[s], row[r]


def pfaffian_numeric(A) -> complex:
    """Floating Pfaffian of a dense skew matrix (may over/underflow; see the log form)."""
    phase, logabs = pfaffian_numeric_log(A)
    if logabs == float("-inf"):
        return 0.0
    import math

    val = phase * math.exp(logabs)
    return val.real if isinstance(val, complex) and val.imag == 0 else val


def pfaffian_numeric_log(A):
    """``(phase, log|Pf|)`` of a dense skew matrix.

    Real input goes through LAPACK Householder tridiagonalisation
    (Q^T A Q = H, so Pf(A) = det(Q) Pf(H), det(Q) = (-1)^{#reflectors});
    complex input uses Parlett-Reid.
    """
    import numpy as np
    from scipy.linalg import lapack

    A = np.asarray(A)
    n = A.shape[0]
    if n % 2:
        return 1.0, float("-inf")
    if n == 0:
        return 1.0, 0.0
    if np.iscomplexobj(A) and np.any(A.imag):
        return _pfaffian_parlett_reid(A)
    A = np.array(np.real(A), dtype=float, order="F")
    H, tau, info = lapack.dgehrd(A)
    if info:
        raise ArithmeticError("dgehrd failed")
    d = H[np.arange(0, n, 2), np.arange(1, n, 2)]
    if not np.all(d):
        return 1.0, float("-inf")
    sign = -1.0 if (int(np.count_nonzero(tau[: n - 1])) + int(np.sum(d < 0))) % 2 else 1.0
    return sign, float(np.sum(np.log(np.abs(d))))


def _pfaffian_parlett_reid(A):
    import cmath
    import numpy as np

    a = np.array(A, dtype=complex)
    n = a.shape[0]
    phase = 1.0 + 0j
    logabs = 0.0
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(a[k + 1:, k])))
        if kp != k + 1:
            a[[k + 1, kp], :] = a[[kp, k + 1], :]
            a[:, [k + 1, kp]] = a[:, [kp, k + 1]]
            phase = -phase
        p = a[k, k + 1]
        if p == 0:
            return 1.0 + 0j, float("-inf")
        phase *= p / abs(p)
        logabs += float(np.log(abs(p)))
        if k + 2 < n:
            tau = a[k, k + 2:] / p
            a[k + 2:, k + 2:] += np.outer(tau, a[k + 2:, k + 1]) - np.outer(a[k + 2:, k + 1], tau)
    return complex(phase), logabs


# ---------------------------------------------------------------------------
# square roots


def series_sqrt(P: GPoly, cutoff: int) -> GPoly:
    """Square root with constant term 1, correct modulo total degree > cutoff.

    Graded coefficient solving: writing Q = 1 + q_1 + q_2 + ..., the degree-d
    part of Q^2 = P gives 2 q_d = p_d - sum_{0<j<d} q_j q_{d-j}.
    When ``2*cutoff >= deg P`` a polynomial root of degree <= cutoff is fully
    determined, so ``NotASquareError`` is raised if Q^2 != P.
    """
    if P.constant_term() != 1:
        raise NotASquareError("series square root needs constant term 1")
    out = _raw_sqrt(P, cutoff)
    if 2 * cutoff >= P.total_degree() and out.square() != P:
        raise NotASquareError("polynomial is not a perfect square")
    return out


def _raw_sqrt(P: GPoly, cutoff: int) -> GPoly:
    parts = _graded_parts(P, cutoff)
    half = GaussRat(1, 0) / 2
    q: List[GPoly] = [GPoly.one()]
    for d in range(1, cutoff + 1):
        # sum_{0<j<d} q_j q_{d-j}, pairing j with d-j
        cross = GPoly.zero()
        for j in range(1, (d + 1) // 2):
            if q[j] and q[d - j]:
                cross = cross + q[j] * q[d - j]
        cross = cross + cross
        if d % 2 == 0 and q[d // 2]:
            cross = cross + q[d // 2].square()
        q.append((parts[d] - cross).scale(half))
    out = GPoly.zero()
    for part in q:
        out = out + part
    return out


def _graded_parts(P: GPoly, cutoff: int) -> List[GPoly]:
    re = [dict() for _ in range(cutoff + 1)]
    im = [dict() for _ in range(cutoff + 1)]
    for src, dst in ((P.re, re), (P.im, im)):
        for m, c in src.items():
            d = mono_degree(m)
            if d <= cutoff:
                dst[d][m] = c
    return [GPoly._raw(r, i) for r, i in zip(re, im)]


def series_sqrt_residual(P: GPoly, cutoff: int) -> Tuple[GPoly, GPoly]:
    """``(Q, P - Q^2)`` for the graded square root Q, without raising."""
    if P.constant_term() != 1:
        raise NotASquareError("series square root needs constant term 1")
    Q = _raw_sqrt(P, cutoff)
    return Q, P - Q * Q


def truncation_agrees(P: GPoly, Q: GPoly, cutoff: int) -> bool:
    return (P - Q).truncate(cutoff).is_zero()


def max_monomial_degree(p: GPoly) -> int:
    return max((mono_degree(m) for m in p.monomials()), default=-1)
