"""Kasteleyn orientations on Fisher graphs, their quadratic forms and Pfaffians.

An orientation is an int with bit ``e`` set when edge ``e`` runs from the
vertex of half-edge ``2e+1`` to that of ``2e`` (bit clear: forward).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .combmap import (
    ChainError,
    CombMap,
    HomologyBasis,
    ccw_boundary,
    cycle_decompose,
    homology_basis,
    left_halfedges,
    oriented_cycle,
    pushoff_intersection,
)
from .exactalg.gaussrat import GaussRat
from .exactalg.gf2 import bit_list
from .exactalg.linalg import SkewMat, pfaffian
from .exactalg.poly import GPoly
from .fisher import FisherGraph, blowup, cycle_to_matching
from .quadform import QuadForm2, arf


class NoKasteleynError(ValueError):
    """The embedded graph has a component with an odd number of vertices."""


@dataclass(frozen=True)
class KOrientation:
    bits: int
    class_id: int = 0

    def tail(self, gamma: CombMap, e: int) -> int:
        return gamma.vertex_of(2 * e + (self.bits >> e & 1))

    def head(self, gamma: CombMap, e: int) -> int:
        return gamma.vertex_of(2 * e + 1 - (self.bits >> e & 1))


def n_disagree(bits: int, walk: Sequence[int]) -> int:
    """Edges of an oriented walk (outgoing half-edges) traversed against K."""
    return sum(1 for h in walk if (h & 1) != (bits >> (h >> 1) & 1))


def face_parities(gamma: CombMap, bits: int) -> List[int]:
    return [n_disagree(bits, ccw_boundary(f)) & 1 for f in gamma.faces()]


def is_kasteleyn(gamma: CombMap, bits: int) -> bool:
    return all(face_parities(gamma, bits))


# ---------------------------------------------------------------------------
# construction


@dataclass
class _TreeCotree:
    tree: int
    leftover: List[int]
    order: List[Tuple[int, int]]   # (face, parent edge) leaves first
    roots: List[int]


def _tree_cotree(gamma: CombMap) -> _TreeCotree:
    tree = gamma.spanning_forest()
    faces = gamma.faces()
    face_of = {}
    for i, f in enumerate(faces):
        for h in f:
            face_of[h] = i
    parent = list(range(len(faces)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    adj: Dict[int, List[Tuple[int, int]]] = {}
    leftover = []
    for e in range(gamma.n_edges):
        if tree >> e & 1:
            continue
        f1, f2 = face_of[2 * e], face_of[2 * e + 1]
        r1, r2 = find(f1), find(f2)
        if r1 == r2:
            leftover.append(e)
            continue
        parent[max(r1, r2)] = min(r1, r2)
        adj.setdefault(f1, []).append((f2, e))
        adj.setdefault(f2, []).append((f1, e))
    seen = set()
    order: List[Tuple[int, int]] = []
    roots = []
    for root in range(len(faces)):
        if root in seen:
            continue
        roots.append(root)
        seen.add(root)
        bfs = [root]
        k = 0
        while k < len(bfs):
            f = bfs[k]
            k += 1
            for g, e in adj.get(f, ()):
                if g not in seen:
                    seen.add(g)
                    bfs.append(g)
                    order.append((g, e))
    order.reverse()
    return _TreeCotree(tree, leftover, order, roots)


def _solve_cotree(gamma: CombMap, tc: _TreeCotree, bits: int) -> int:
    """Fix cotree edges (leaves first) so every non-root face is odd."""
    faces = gamma.faces()
    for f, e in tc.order:
        par = n_disagree(bits, ccw_boundary(faces[f])) & 1
        if not par:
            bits ^= 1 << e
    return bits


def normalize_clusters(F: FisherGraph, bits: int) -> int:
    """Vertex flips bringing every cluster to a_i->b_i, b_{i+1}->a_i, b_{i+1}->b_i."""
    gamma = F.gamma
    flips = 0
    for A, B, ids in zip(F.cluster_a, F.cluster_b, F.internal_edges):
        n = len(A)
        if not n:
            continue
        flip = {B[0]: 0}
        # spanning tree: the b-chain, then the spokes a_i - b_i
        for i in range(n - 1):
            e = ids[n + 2 * i + 1]  # b_{i+1} -> b_i
            flip[B[i + 1]] = flip[B[i]] ^ (bits >> e & 1)
        for i in range(n):
            e = ids[i]
            flip[A[i]] = flip[B[i]] ^ (bits >> e & 1)
        for u, f in flip.items():
            if f:
                flips |= 1 << u
    for e in range(gamma.n_edges):
        a, b = gamma.endpoints(e)
        if (flips >> a ^ flips >> b) & 1:
            bits ^= 1 << e
    for ids in F.internal_edges:
        for e in ids:
            if bits >> e & 1:
                raise AssertionError("cluster normalization failed: orientation is not Kasteleyn")
    return bits


def find_kasteleyn(F: FisherGraph) -> KOrientation:
    gamma = F.gamma
    for verts, _ in gamma.components():
        if len(verts) % 2:
            raise NoKasteleynError("a component has an odd number of vertices")
    tc = _tree_cotree(gamma)
    bits = _solve_cotree(gamma, tc, 0)
    if not is_kasteleyn(gamma, bits):
        raise NoKasteleynError("no Kasteleyn orientation exists")
    return KOrientation(normalize_clusters(F, bits))


def find_kasteleyn_map(gamma: CombMap) -> int:
    """Kasteleyn orientation bits of an arbitrary embedded graph."""
    for verts, _ in gamma.components():
        if len(verts) % 2:
            raise NoKasteleynError("a component has an odd number of vertices")
    bits = _solve_cotree(gamma, _tree_cotree(gamma), 0)
    if not is_kasteleyn(gamma, bits):
        raise NoKasteleynError("no Kasteleyn orientation exists")
    return bits


def class_generators(F: FisherGraph) -> List[int]:
    """Face-even edge sets representing a basis of classes modulo vertex flips.

    Toggling one leftover (non-tree, non-cotree) edge and re-solving the
    cotree changes K by such a set.
    """
    gamma = F.gamma
    tc = _tree_cotree(gamma)
    base = _solve_cotree(gamma, tc, 0)
    return [base ^ _solve_cotree(gamma, tc, 1 << e) for e in tc.leftover]


def enumerate_classes(F: FisherGraph, K0: Optional[KOrientation] = None,
                      basis: Optional[HomologyBasis] = None) -> List[KOrientation]:
    """One normalized representative per class, sorted so that class_id equals
    the bitmask of quadratic-form values on the homology basis."""
    if K0 is None:
        K0 = find_kasteleyn(F)
    if basis is None:
        basis = homology_basis(F.G)
    gens = class_generators(F)
    reps: Dict[int, KOrientation] = {}
    for S in range(1 << len(gens)):
        bits = K0.bits
        for i in bit_list(S):
            bits ^= gens[i]
        bits = normalize_clusters(F, bits)
        q = quad_form(F, KOrientation(bits), basis)
        if q.values in reps:
            raise AssertionError("two class representatives share a quadratic form")
        reps[q.values] = KOrientation(bits, q.values)
    return [reps[k] for k in sorted(reps)]


# ---------------------------------------------------------------------------
# matrices and signs


def kasteleyn_matrix(F: FisherGraph, K: KOrientation) -> SkewMat:
    gamma = F.gamma
    A = SkewMat(gamma.n_vertices)
    for e in range(gamma.n_edges):
        A.add(K.tail(gamma, e), K.head(gamma, e), gamma.weights[e])
    return A


def perm_sign(seq: Sequence[int]) -> int:
    seen = [False] * len(seq)
    sign = 1
    for i in range(len(seq)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = seq[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def eps_sign(F: FisherGraph, K: KOrientation, M: int, labels: Optional[Sequence[int]] = None) -> int:
    """Sign of the matching M in the Pfaffian expansion of the Kasteleyn matrix.

    ``labels`` optionally relabels Gamma's vertices (a permutation of range(V)).
    """
    gamma = F.gamma
    lab = labels if labels is not None else range(gamma.n_vertices)
    seq = []
    sign = 1
    for e in bit_list(M):
        u, w = gamma.endpoints(e)
        seq += [lab[u], lab[w]]
        if K.tail(gamma, e) != u:
            sign = -sign
    if sorted(seq) != list(range(gamma.n_vertices)):
        raise ChainError("not a perfect matching")
    return sign * perm_sign(seq)


def ell_left(gamma: CombMap, M: int, walk: Sequence[int]) -> int:
    """Vertices of the oriented cycle whose M-dimer points out to its left."""
    count = 0
    for _, hs in left_halfedges(gamma, walk):
        if any(M >> (h >> 1) & 1 for h in hs):
            count += 1
    return count


def q_from_cycles(gamma: CombMap, bits: int, M: int, cycles: Sequence[int]) -> int:
    """Value of the form on the class of pairwise disjoint-or-crossing simple cycles:
    sum of n^K + ell_M + 1 over cycles plus their pairwise intersections."""
    total = 0
    for C in cycles:
        walk = oriented_cycle(gamma, C)
        total += n_disagree(bits, walk) + ell_left(gamma, M, walk) + 1
    for i in range(len(cycles)):
        for j in range(i + 1, len(cycles)):
            total += pushoff_intersection(gamma, cycles[i], cycles[j])
    return total & 1


def quad_form(F: FisherGraph, K: KOrientation, hb: HomologyBasis) -> QuadForm2:
    """q^K_{M0} on G's homology basis, evaluated on M_b + M0 for each basis cycle b."""
    vals = 0
    for i, b in enumerate(hb.basis):
        Mb = cycle_to_matching(F, b)
        comps = cycle_decompose(F.gamma, Mb ^ F.m0)
        if q_from_cycles(F.gamma, K.bits, F.m0, comps):
            vals |= 1 << i
    return QuadForm2.make(vals, hb.intersection)


# ---------------------------------------------------------------------------
# Pfaffian formula


def cluster_block(n: int) -> SkewMat:
    """Constant Kasteleyn block of one normalized degree-n cluster (2n x 2n)."""
    rot = [tuple(2 * k for k in range(n))] + [(2 * k + 1,) for k in range(n)]
    F = blowup(CombMap(rot))
    A, B = F.cluster_a[0], F.cluster_b[0]
    idx = sorted(A + B)
    gamma = F.gamma
    block = SkewMat(2 * n)
    pos = {v: k for k, v in enumerate(idx)}
    for e in F.internal_edges[0]:
        block.add(pos[gamma.vertex_of(2 * e)], pos[gamma.vertex_of(2 * e + 1)], 1)
    return block


@dataclass
class ClassData:
    K: KOrientation
    q: QuadForm2
    arf: int
    eps_m0: int
    matrix: SkewMat


def spin_classes(F: FisherGraph, hb: Optional[HomologyBasis] = None) -> List[ClassData]:
    if hb is None:
        hb = homology_basis(F.G)
    out = []
    for K in enumerate_classes(F, None, hb):
        q = quad_form(F, K, hb)
        out.append(ClassData(K, q, arf(q), eps_sign(F, K, F.m0), kasteleyn_matrix(F, K)))
    return out


def z_dimer_pfaffian(F: FisherGraph, mode: str = "symbolic", point=None,
                     classes: Optional[List[ClassData]] = None):
    """(1/2^g) sum over classes of (-1)^Arf eps(M0) Pf(A^K)."""
    if classes is None:
        classes = spin_classes(F)
    g2 = classes[0].q.rank
    total = GPoly.zero() if mode == "symbolic" else GaussRat(0)
    for c in classes:
        pf = pfaffian(c.matrix, mode, point)
        term = pf if c.eps_m0 * (1 - 2 * c.arf) > 0 else -pf
        total = total + term
    scale = Fraction(1, 1 << (g2 // 2))
    return total.scale(scale) if mode == "symbolic" else total * GaussRat(scale)


# ---------------------------------------------------------------------------
# numeric Pfaffians for large graphs


def _elimination_set(F: FisherGraph) -> List[List[int]]:
    """Per-cluster vertex blocks to eliminate before the dense Pfaffian.

    The inner b-vertices of even-degree clusters go (a path with a perfect
    matching of constant weight), and so do all vertices of a greedy
    independent set of loopless even-degree clusters.  Different blocks share
    no edge, so the eliminated submatrix is block diagonal with Pfaffians +-1.
    """
    G = F.G
    picked = set()
    for v in range(G.n_vertices):
        n = G.degree(v)
        if n == 0 or n % 2 or any(G.vertex_of(h ^ 1) == v for h in G.rotations[v]):
            continue
        nbrs = {G.vertex_of(h ^ 1) for h in G.rotations[v]} - {v}
        if not nbrs & picked:
            picked.add(v)
    blocks = []
    for v in range(G.n_vertices):
        if v in picked:
            blocks.append(F.cluster_a[v] + F.cluster_b[v])
        elif F.cluster_b[v] and len(F.cluster_b[v]) % 2 == 0:
            blocks.append(list(F.cluster_b[v]))
    return blocks


def numeric_edge_weights(gamma: CombMap, point) -> List[complex]:
    return [w.evaluate_complex(point) for w in gamma.weights]


def pfaffian_reduced_log(F: FisherGraph, K: KOrientation, wvals: Sequence[complex]):
    """``(phase, log|Pf A^K|)`` at numeric edge weights, by block Schur reduction.

    With the eliminated vertices X listed first,
    Pf(A) = sign(perm) Pf(A_XX) Pf(A_YY - A_YX A_XX^{-1} A_XY).
    """
    import numpy as np
    from scipy.sparse import csc_matrix
    from scipy.sparse.linalg import splu

    from .exactalg.linalg import pfaffian_numeric_log

    gamma = F.gamma
    n = gamma.n_vertices
    if n == 0:
        return 1.0, 0.0
    blocks = _elimination_set(F)
    X = [u for b in blocks for u in b]
    inX = set(X)
    Y = [u for u in range(n) if u not in inX]
    order = X + Y
    pos = np.empty(n, dtype=int)
    pos[order] = np.arange(n)
    real = all(complex(w).imag == 0 for w in wvals)
    dtype = float if real else complex
    rows, cols, vals = [], [], []
    for e in range(gamma.n_edges):
        w = wvals[e]
        if w == 0:
            continue
        w = complex(w).real if real else complex(w)
        t, h = pos[K.tail(gamma, e)], pos[K.head(gamma, e)]
        rows += [t, h]
        cols += [h, t]
        vals += [w, -w]
    A = csc_matrix((np.array(vals, dtype=dtype), (rows, cols)), shape=(n, n))
    phase = perm_sign(list(order))
    logabs = 0.0
    k = 0
    for b in blocks:
        m = len(b)
        ph, la = pfaffian_numeric_log(A[k:k + m, k:k + m].toarray())
        phase *= ph
        logabs += la
        k += m
    if logabs == float("-inf"):
        return 1.0, logabs
    nx = len(X)
    if nx == n:
        return phase, logabs
    Axx = A[:nx, :nx].tocsc()
    Axy = A[:nx, nx:].toarray()
    Ayx = A[nx:, :nx]
    S = A[nx:, nx:].toarray() - Ayx @ splu(Axx).solve(Axy)
    S = (S - S.T) / 2
    ph, la = pfaffian_numeric_log(S)
    return phase * ph, logabs + la


def z_dimer_numeric(F: FisherGraph, classes: Sequence[ClassData], point) -> complex:
    """(1/2^g) sum over classes of (-1)^Arf eps(M0) Pf(A^K) in floating point."""
    import cmath
    import math

    wvals = numeric_edge_weights(F.gamma, point)
    terms = []
    for c in classes:
        ph, la = pfaffian_reduced_log(F, c.K, wvals)
        if la == float("-inf"):
            continue
        s = c.eps_m0 * (1 - 2 * c.arf)
        terms.append((s * ph, la))
    if not terms:
        return 0.0
    top = max(la for _, la in terms)
    total = sum(ph * math.exp(la - top) for ph, la in terms)
    g = classes[0].q.rank // 2
    out = total * math.exp(top) / (1 << g)
    if isinstance(out, complex) and out.imag == 0:
        return out.real
    return out
