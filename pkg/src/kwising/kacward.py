"""Generalized Kac-Ward matrices and the alternating determinant formula.

The matrix for a Kasteleyn class K is built from the Fisher graph: with A_aa
the external block of the Kasteleyn matrix and L the per-cluster Schur
complement of the inner b-vertices, det A^K = det(I + A_aa L^{-1}).  A
diagonal rescaling by i^{K(a)} turns I + A_aa L^{-1} into a matrix with unit
diagonal and off-diagonal entries (-i)^{K(a)+K(a')} l_{a''a'} x_e indexed by
oriented edges (an oriented edge is named by its starting half-edge).
Inner blocks are invertible only at even degree, so odd vertices are first
paired up by doubling tree paths with weight-0 edges; those edges give unit
rows and are dropped from the final matrix.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .combmap import CombMap, HomologyBasis, MapError, homology_basis
from .exactalg.gaussrat import GaussRat, unit_power
from .exactalg.gf2 import bit_list
from .exactalg.linalg import (
    SYMBOLIC_DET_THRESHOLD,
    SquareMat,
    det,
    det_field,
    pfaffian,
    series_sqrt,
)
from .exactalg.poly import GPoly
from .fisher import FisherGraph, blowup
from .kasteleyn import ClassData, KOrientation, cluster_block, spin_classes


class GeometryError(MapError):
    """Planar coordinates are missing or inconsistent with the rotation system."""


# ---------------------------------------------------------------------------
# preprocessing


def _insert_after(rot: List[int], h: int, new: int) -> None:
    rot.insert(rot.index(h) + 1, new)


def _insert_before(rot: List[int], h: int, new: int) -> None:
    rot.insert(rot.index(h), new)


def even_degrees(G: CombMap) -> CombMap:
    """Double a T-join of the odd vertices (inside a spanning forest) with weight-0 edges.

    Each copy sits right next to its original at both ends, so the pair bounds
    a digon and the surface is unchanged.
    """
    odd = {v for v in range(G.n_vertices) if G.degree(v) % 2}
    if not odd:
        return G
    tree = G.spanning_forest()
    adj: Dict[int, List[Tuple[int, int]]] = {}
    for e in bit_list(tree):
        a, b = G.endpoints(e)
        adj.setdefault(a, []).append((b, e))
        adj.setdefault(b, []).append((a, e))
    join = []
    seen = set()
    for root in range(G.n_vertices):
        if root in seen:
            continue
        seen.add(root)
        order = [(root, None, None)]
        k = 0
        while k < len(order):
            v = order[k][0]
            k += 1
            for w, e in adj.get(v, ()):
                if w not in seen:
                    seen.add(w)
                    order.append((w, v, e))
        below = {v: (v in odd) for v, _, _ in order}
        for v, parent, e in reversed(order):
            if parent is None:
                continue
            if below[v]:
                join.append(e)
                below[parent] = not below[parent]
    rots = [list(r) for r in G.rotations]
    weights = list(G.weights)
    names = list(G.edge_names)
    for e in sorted(join):
        k = len(weights)
        h, hm = 2 * e, 2 * e + 1
        _insert_after(rots[G.vertex_of(h)], h, 2 * k)
        _insert_before(rots[G.vertex_of(hm)], hm, 2 * k + 1)
        weights.append(GPoly.zero())
        names.append(f"{G.edge_names[e]}~")
    return CombMap(rots, weights, None, names, G.vertex_names)


def subdivide_loops(G: CombMap) -> CombMap:
    """Put a new degree-2 vertex inside every loop; the new half carries weight 1."""
    rots = [list(r) for r in G.rotations]
    weights = list(G.weights)
    names = list(G.edge_names)
    vnames = list(G.vertex_names)
    for e in range(G.n_edges):
        if not G.is_loop(e):
            continue
        k = len(weights)
        v = len(rots)
        # edge e now ends at the new vertex; edge k runs from it back to the old slot of 2e+1
        hm = 2 * e + 1
        r = rots[G.vertex_of(hm)]
        r[r.index(hm)] = 2 * k + 1
        rots.append([hm, 2 * k])
        weights.append(GPoly.one())
        names.append(f"{G.edge_names[e]}'")
        vnames.append(f"{G.vertex_names[G.vertex_of(hm)]}'{e}")
    return CombMap(rots, weights, None, names, vnames)


def preprocess(G: CombMap, loops: bool = True) -> CombMap:
    """Loopless (when ``loops``) and even-degree version of G with the same partition functions."""
    H = subdivide_loops(G) if loops else G
    return even_degrees(H)


# ---------------------------------------------------------------------------
# cluster inverse


def _inverse(rows: List[List[Fraction]]) -> List[List[Fraction]]:
    n = len(rows)
    a = [list(map(Fraction, r)) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for k in range(n):
        p = next(i for i in range(k, n) if a[i][k])
        a[k], a[p] = a[p], a[k]
        inv = 1 / a[k][k]
        a[k] = [x * inv for x in a[k]]
        for i in range(n):
            if i != k and a[i][k]:
                f = a[i][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    return [r[n:] for r in a]


@lru_cache(maxsize=None)
def cluster_transition(n: int) -> Tuple[Tuple[int, ...], ...]:
    """l_{jk}: inverse of the outer-vertex Schur complement of a degree-n cluster.

    Rows and columns are indexed by a_1..a_n.  Needs n even.
    """
    if n % 2:
        raise ValueError("cluster Schur complement needs even degree")
    S = cluster_block(n).to_square()
    c = lambda i, j: S[i, j].constant_term().re  # noqa: E731
    ia = [2 * k for k in range(n)]
    ib = [2 * k + 1 for k in range(n)]
    Abb_inv = _inverse([[c(i, j) for j in ib] for i in ib])
    Aab = [[c(i, j) for j in ib] for i in ia]
    Aba = [[c(i, j) for j in ia] for i in ib]
    tmp = [[sum(Abb_inv[r][s] * Aba[s][col] for s in range(n)) for col in range(n)] for r in range(n)]
    L = [[-sum(Aab[r][s] * tmp[s][col] for s in range(n)) for col in range(n)] for r in range(n)]
    Linv = _inverse(L)
    out = []
    for row in Linv:
        if any(x.denominator != 1 for x in row):
            raise AssertionError("cluster inverse is not integral")
        out.append(tuple(int(x) for x in row))
    return tuple(out)


# ---------------------------------------------------------------------------
# Kac-Ward matrix


@dataclass
class KWMatrix:
    matrix: SquareMat
    half_edges: List[int]   # row/column index -> starting half-edge in F.G

    @property
    def size(self) -> int:
        return self.matrix.size


_UNITS = [(unit_power(k), -unit_power(k)) for k in range(4)]


def kw_matrix(F: FisherGraph, K: KOrientation, drop_zero: bool = True, conjugate: bool = True,
              weights: Optional[Sequence[GPoly]] = None) -> KWMatrix:
    """Unit-diagonal Kac-Ward matrix of class K on the (even-degree) graph F.G.

    With ``conjugate=False`` the diagonal factors (-i)^K are left out, giving
    the real similar matrix I + A_aa L^{-1}.  ``weights`` overrides F.G's.
    """
    G, gamma = F.G, F.gamma
    W = list(weights) if weights is not None else list(G.weights)
    for v in range(G.n_vertices):
        if G.degree(v) % 2:
            raise ValueError("kw_matrix needs every vertex of even degree; run preprocess first")
    for ids in F.internal_edges:
        if any(K.bits >> e & 1 for e in ids):
            raise ValueError("orientation is not cluster-normalized")
    halves = [h for h in range(2 * G.n_edges) if not (drop_zero and W[h >> 1].is_zero())]
    index = {h: k for k, h in enumerate(halves)}

    def Kbit(h: int) -> int:
        # 1 when the external edge is oriented towards the outer vertex of h
        return int(K.head(gamma, h >> 1) == gamma.vertex_of(h))

    M = SquareMat(len(halves))
    for h in halves:
        r = index[h]
        M[r, r] = 1
    for h in halves:
        e = h >> 1
        x = W[e]
        if x.is_zero():
            continue
        a = F.a_of_half[h]
        a2 = F.a_of_half[h ^ 1]
        eps = -1 if Kbit(h) else 1
        v2 = F.cluster_of[a2]
        A2 = F.cluster_a[v2]
        ell = cluster_transition(len(A2))
        j = A2.index(a2)
        for k, ap in enumerate(A2):
            hp = F.half_of_a[ap]
            if hp not in index or not ell[j][k]:
                continue
            unit = _UNITS[(Kbit(h) - Kbit(hp)) % 4 if conjugate else 0][eps * ell[j][k] < 0]
            r, c = index[h], index[hp]
            M[r, c] = M[r, c] + x.scale(unit)
    return KWMatrix(M, halves)


def kw_det(M: KWMatrix, mode: str = "symbolic", point=None, threshold: int = SYMBOLIC_DET_THRESHOLD):
    return det(M.matrix, mode, point=point, threshold=threshold)


def kw_det_sqrt(M: KWMatrix, threshold: int = SYMBOLIC_DET_THRESHOLD, D: Optional[GPoly] = None) -> GPoly:
    """The square root of det(M) with constant term +1 (exact; raises if not a square)."""
    if D is None:
        D = kw_det(M, threshold=threshold)
    return det_root(D, M.size)


def det_root(D: GPoly, size: int) -> GPoly:
    """Exact square root of a size x size Kac-Ward determinant D."""
    return series_sqrt(D, max(size // 2, (D.total_degree() + 1) // 2))


# ---------------------------------------------------------------------------
# the alternating sum


def class_determinants(F: FisherGraph, classes: Sequence[ClassData],
                       threshold: int = SYMBOLIC_DET_THRESHOLD) -> List[GPoly]:
    """det B^K for every class, from a single symbolic determinant.

    Without the diagonal unit conjugation, two classes' matrices differ only by
    x_e -> -x_e on the external edges whose orientation differs.  So one
    determinant with a fresh variable per edge gives every class by a sign
    substitution.  The entrywise premise is checked per class; a class that
    fails it gets a direct determinant.
    """
    G = F.G
    live = [e for e in range(G.n_edges) if not G.weights[e].is_zero()]
    fresh = {e: f"_w{e + 1}" for e in live}
    generic = [GPoly.var(fresh[e]) if e in fresh else GPoly.zero() for e in range(G.n_edges)]
    K0 = classes[0].K
    Bg = kw_matrix(F, K0, conjugate=False, weights=generic).matrix
    Dg = det(Bg, threshold=threshold)
    out = []
    for c in classes:
        flip = c.K.bits ^ K0.bits
        vals = {fresh[e]: -G.weights[e] if flip >> e & 1 else G.weights[e] for e in live}
        B = kw_matrix(F, c.K, conjugate=False).matrix
        if Bg.substitute(vals) == B:
            out.append(Dg.substitute(vals))
        else:
            out.append(det(B, threshold=threshold))
    return out



@dataclass
class KacWardSetup:
    G: CombMap
    H: CombMap                 # even-degree version used for the matrices
    F: FisherGraph
    classes: List[ClassData]
    hb: Optional[HomologyBasis] = None   # homology basis of H the classes are keyed by

    @property
    def genus(self) -> int:
        return self.classes[0].q.rank // 2


def setup(G: CombMap) -> KacWardSetup:
    H = even_degrees(G)
    F = blowup(H)
    hb = homology_basis(H)
    return KacWardSetup(G, H, F, spin_classes(F, hb), hb)


def z_ising_kacward(G: CombMap, mode: str = "symbolic", point=None, threshold: int = SYMBOLIC_DET_THRESHOLD,
                    ks: Optional[KacWardSetup] = None):
    """(1/2^g) sum over spin classes of (-1)^Arf det^{1/2}.

    Symbolic mode takes exact square roots of symbolic determinants; evaluated
    mode replaces each root by the signed Pfaffian eps(M0) Pf(A^K) at ``point``.
    """
    ks = ks or setup(G)
    scale = Fraction(1, 1 << ks.genus)
    if mode == "symbolic":
        total = GPoly.zero()
        size = kw_matrix(ks.F, ks.classes[0].K).size
        for c, D in zip(ks.classes, class_determinants(ks.F, ks.classes, threshold)):
            root = det_root(D, size)
            total = total - root if c.arf else total + root
        return total.scale(scale)
    if mode == "evaluated":
        if point is None:
            raise ValueError("evaluated mode needs a point")
        total = GaussRat(0)
        for c in ks.classes:
            root = pfaffian(c.matrix, "evaluated", point) * c.eps_m0
            total = total - root if c.arf else total + root
        return total * GaussRat(scale)
    raise ValueError(f"unknown mode {mode!r}")


def signed_pfaffian_numeric(c: ClassData, point) -> complex:
    from .exactalg.linalg import pfaffian_numeric

    return c.eps_m0 * pfaffian_numeric(c.matrix.evaluate_complex(point))


# ---------------------------------------------------------------------------
# planar geometric matrix


def _angle(u, v) -> float:
    """Oriented angle from vector u to vector v in (-pi, pi]."""
    a = math.atan2(float(u[0] * v[1] - u[1] * v[0]), float(u[0] * v[0] + u[1] * v[1]))
    return math.pi if a == -math.pi else a


def kw_matrix_planar_geometric(G: CombMap, point: Dict[str, complex]):
    """I - T with T_{e,e'} = exp(i angle(e,e')/2) x_e for straight-line planar G."""
    import numpy as np

    if G.coords is None:
        raise GeometryError("geometric mode needs vertex coordinates")
    if G.genus != 0:
        raise GeometryError("geometric mode is planar only")
    n = 2 * G.n_edges
    M = np.eye(n, dtype=complex)
    xs = [w.evaluate_complex(point) for w in G.weights]
    for h in range(n):
        d = G.direction(h)
        v = G.vertex_of(h ^ 1)
        for hp in G.rotations[v]:
            if hp == h ^ 1:
                continue
            ang = _angle(d, G.direction(hp))
            M[h, hp] -= cmath.exp(0.5j * ang) * xs[h >> 1]
    return M
