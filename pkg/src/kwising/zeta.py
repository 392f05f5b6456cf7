"""Prime reduced closed paths and the truncated product formula for det(I - T).

A closed path is a cyclic word of half-edges, each starting where the
previous one ends.  Reduced means no half-edge is followed by its mate (also
across the wrap-around); prime means the word is not a proper power.  For
T = I - B with B a Kac-Ward matrix,

    det(I - T) = prod over oriented prime reduced paths of (1 - w(gamma)),

where w(gamma) multiplies the T-entries along gamma.  We check this modulo
total degree > L using paths of length <= L.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .combmap import CombMap
from .exactalg.gaussrat import GaussRat
from .exactalg.linalg import CapacityError, SquareMat, _graded_parts, det
from .exactalg.poly import GPoly, unpack

PATH_CAP = 10


@dataclass(frozen=True, order=True)
class ClosedPath:
    halfedges: Tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.halfedges)

    def edges(self) -> List[int]:
        return [h >> 1 for h in self.halfedges]

    def reverse(self) -> "ClosedPath":
        return ClosedPath(least_rotation(tuple(h ^ 1 for h in reversed(self.halfedges))))

    def label(self, G: Optional[CombMap] = None) -> str:
        names = G.edge_names if G is not None else None
        parts = []
        for h in self.halfedges:
            e = h >> 1
            name = f"e{names[e]}" if names else f"e{e + 1}"
            parts.append(name if h % 2 == 0 else name + "^-1")
        return "*".join(parts)


def least_rotation(word: Tuple[int, ...]) -> Tuple[int, ...]:
    return min(word[k:] + word[:k] for k in range(len(word))) if word else word


def is_primitive(word: Sequence[int]) -> bool:
    n = len(word)
    for d in range(1, n):
        if n % d == 0 and all(word[i] == word[i % d] for i in range(n)):
            return False
    return True


def canonical(word: Tuple[int, ...]) -> Tuple[int, ...]:
    """Least rotation of the least of the word and its reversal."""
    rev = tuple(h ^ 1 for h in reversed(word))
    return min(least_rotation(word), least_rotation(rev))


def _oriented_paths(G: CombMap, L: int, live: int) -> List[ClosedPath]:
    """Oriented prime reduced closed paths up to rotation, one word per class."""
    out: List[ClosedPath] = []
    halves = [h for h in range(2 * G.n_edges) if live >> (h >> 1) & 1]
    at: Dict[int, List[int]] = {}
    for h in halves:
        at.setdefault(G.vertex_of(h), []).append(h)
    for v in at:
        at[v].sort()
    for h0 in halves:
        # words whose least letter is h0, written from h0
        word = [h0]

        def rec():
            h = word[-1]
            head = G.vertex_of(h ^ 1)
            if head == G.vertex_of(h0) and h0 != h ^ 1:
                w = tuple(word)
                if w == least_rotation(w) and is_primitive(w):
                    out.append(ClosedPath(w))
            if len(word) == L:
                return
            for nxt in at.get(head, ()):
                if nxt < h0 or nxt == h ^ 1:
                    continue
                word.append(nxt)
                rec()
                word.pop()

        rec()
    out.sort(key=lambda p: (p.length, p.halfedges))
    return out


def prime_reduced_paths(G: CombMap, L: int, cap: int = PATH_CAP, oriented: bool = False,
                        live: Optional[int] = None) -> List[ClosedPath]:
    """Prime reduced closed paths of length <= L, each once, in (length, word) order.

    Unoriented paths (default) are stored in canonical form; ``live`` limits
    the edges that may be used.
    """
    if L > cap:
        raise CapacityError(f"path length {L} exceeds cap {cap}")
    if live is None:
        live = G.all_edges()
    paths = _oriented_paths(G, L, live)
    if oriented:
        return paths
    seen = set()
    out = []
    for p in paths:
        c = canonical(p.halfedges)
        if c not in seen:
            seen.add(c)
            out.append(ClosedPath(c))
    out.sort(key=lambda p: (p.length, p.halfedges))
    return out


def path_weight(T: Dict[Tuple[int, int], GPoly], index: Dict[int, int], path: ClosedPath) -> GPoly:
    hs = path.halfedges
    w = GPoly.one()
    for k, h in enumerate(hs):
        nxt = hs[(k + 1) % len(hs)]
        t = T.get((index[h], index[nxt]))
        if t is None:
            return GPoly.zero()
        w = w * t
    return w


@dataclass
class BassReport:
    ok: bool
    L: int
    lhs: GPoly
    rhs: GPoly
    n_paths: int
    first_mismatch: Optional[Tuple[Dict[str, int], str]] = None
    # unoriented path label -> (-1)^lambda read off as w(gamma) / x(gamma)
    signs: Dict[str, int] = field(default_factory=dict)
    signs_ok: bool = True


def _euler_product(weights: List[GPoly], L: int) -> GPoly:
    """prod (1 - w) mod degree > L.

    Without constant terms this is exp(-sum_k w^k / k), expanded with the
    graded recursion d E_d = sum_j j P_j E_{d-j}.
    """
    if any(w.constant_term() != 0 for w in weights):
        out = GPoly.one()
        for w in weights:
            out = out.mul(GPoly.one() - w, cutoff=L)
        return out
    P = GPoly.zero()
    for w in weights:
        wk = w
        for k in range(1, L + 1):
            if wk.is_zero():
                break
            P = P - wk.scale(Fraction(1, k))
            wk = wk.mul(w, cutoff=L)
    parts = _graded_parts(P, L)
    E = [GPoly.one()]
    for d in range(1, L + 1):
        acc = GPoly.zero()
        for j in range(1, d + 1):
            if not parts[j].is_zero() and not E[d - j].is_zero():
                acc = acc + (parts[j] * E[d - j]).scale(j)
        E.append(acc.scale(Fraction(1, d)))
    out = GPoly.zero()
    for part in E:
        out = out + part
    return out


def transition_entries(M: SquareMat) -> Dict[Tuple[int, int], GPoly]:
    """Nonzero entries of T = I - M."""
    out = {}
    for (i, j), p in M.entries.items():
        t = -p
        if i == j:
            t = t + 1
        if not t.is_zero():
            out[(i, j)] = t
    return out


def verify_bass(F, K, L: int, cap: int = PATH_CAP) -> BassReport:
    """Compare det(I - T) with the path product modulo total degree > L.

    ``F`` is the Fisher graph of an even-degree map and ``K`` a normalized
    Kasteleyn orientation of it.
    """
    from .kacward import kw_matrix

    G = F.G
    KW = kw_matrix(F, K)
    index = {h: k for k, h in enumerate(KW.half_edges)}
    lhs = det(KW.matrix, "truncated", cutoff=L)
    T = transition_entries(KW.matrix)
    live = 0
    for e in range(G.n_edges):
        if not G.weights[e].is_zero():
            live |= 1 << e
    paths = prime_reduced_paths(G, L, cap, oriented=True, live=live)
    weights = [w for w in (path_weight(T, index, p) for p in paths) if not w.is_zero()]
    rhs = _euler_product(weights, L)
    diff = (lhs - rhs).truncate(L)
    first = None
    if not diff.is_zero():
        m = min(diff.monomials(), key=lambda m: (sum(unpack(m).values()), m))
        first = (unpack(m), str(diff.coeff(m)))
    signs: Dict[str, int] = {}
    signs_ok = True
    for p in prime_reduced_paths(G, L, cap, live=live):
        w = path_weight(T, index, p)
        x = GPoly.one()
        for e in p.edges():
            x = x * G.weights[e]
        if w.is_zero() or x.is_zero():
            continue
        try:
            r = w.exact_div(x)
        except ArithmeticError:
            signs_ok = False
            continue
        c = r.constant_term()
        if r != GPoly.const(c) or c not in (GaussRat(1), GaussRat(-1)):
            signs_ok = False
            continue
        signs[p.label(G)] = 1 if c == GaussRat(1) else -1
    return BassReport(first is None, L, lhs.truncate(L), rhs, len(paths), first, signs, signs_ok)
