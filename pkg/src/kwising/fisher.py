"""Fisher blow-up G -> Gamma_G and dimer-side brute force.

Each vertex of degree n becomes a cluster of outer vertices a_1..a_n (one per
half-edge, starting at the smallest half-edge id and running clockwise) and
inner vertices b_1..b_n, joined by an open chain of triangles
a_i b_i b_{i+1}.  Gamma's vertices are numbered cluster by cluster as
a_1, b_1, a_2, b_2, ...  External edge k of G keeps id k in Gamma; internal
edges follow, with the half-edge ``2k`` placed so that the forward direction
is the normalized cluster orientation a_i->b_i, b_{i+1}->a_i, b_{i+1}->b_i.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

from .combmap import ChainError, CombMap, HomologyBasis, homology_class
from .exactalg.gf2 import bit_list
from .exactalg.linalg import CapacityError
from .exactalg.poly import GPoly

MATCHING_CAP = 1 << 20


@dataclass
class FisherGraph:
    G: CombMap
    gamma: CombMap
    cluster_a: List[List[int]]      # per G-vertex, Gamma ids of a_1..a_n
    cluster_b: List[List[int]]
    half_of_a: Dict[int, int]       # Gamma outer vertex -> G half-edge
    a_of_half: List[int]            # G half-edge -> Gamma outer vertex
    cluster_of: List[int]           # Gamma vertex -> G vertex
    internal_edges: List[List[int]]  # per G-vertex, Gamma edge ids of its gadget
    m0: int

    @property
    def n_external(self) -> int:
        return self.G.n_edges

    def external_part(self, chain: int) -> int:
        return chain & ((1 << self.G.n_edges) - 1)

    def index_in_cluster(self, a: int) -> int:
        """1-based position i of an outer vertex a_i within its cluster."""
        return self.cluster_a[self.cluster_of[a]].index(a) + 1


def blowup(G: CombMap) -> FisherGraph:
    E = G.n_edges
    rot_gamma: List[List[int]] = []
    cluster_a: List[List[int]] = []
    cluster_b: List[List[int]] = []
    cluster_of: List[int] = []
    a_of_half = [0] * (2 * E)
    half_of_a: Dict[int, int] = {}
    internal: List[List[int]] = []
    weights: List[object] = list(G.weights)
    next_edge = [E]

    def new_edge(u_slot: List[int], w_slot: List[int]) -> int:
        k = next_edge[0]
        next_edge[0] += 1
        u_slot.append(2 * k)
        w_slot.append(2 * k + 1)
        weights.append(1)
        return k

    for v, rot in enumerate(G.rotations):
        n = len(rot)
        base = len(rot_gamma)
        s = rot.index(min(rot)) if n else 0
        hs = [rot[(s - k) % n] for k in range(n)]  # clockwise from the smallest
        A = [base + 2 * k for k in range(n)]
        B = [base + 2 * k + 1 for k in range(n)]
        cluster_a.append(A)
        cluster_b.append(B)
        for _ in range(2 * n):
            rot_gamma.append([])
            cluster_of.append(v)
        for k, h in enumerate(hs):
            a_of_half[h] = A[k]
            half_of_a[A[k]] = h
            rot_gamma[A[k]].append(h)
        # slots collected per vertex in the order they must appear ccw
        a_b = [None] * n        # a_i - b_i
        a_bn = [None] * n       # a_i - b_{i+1}
        b_bn = [None] * n       # b_i - b_{i+1}
        ab_at_a = [[] for _ in range(n)]
        ab_at_b = [[] for _ in range(n)]
        abn_at_a = [[] for _ in range(n)]
        abn_at_b = [[] for _ in range(n)]
        bbn_at_lo = [[] for _ in range(n)]
        bbn_at_hi = [[] for _ in range(n)]
        ids = []
        for i in range(n):
            a_b[i] = new_edge(ab_at_a[i], ab_at_b[i])          # a_i -> b_i
            ids.append(a_b[i])
        for i in range(n - 1):
            a_bn[i] = new_edge(abn_at_b[i], abn_at_a[i])       # b_{i+1} -> a_i
            ids.append(a_bn[i])
            b_bn[i] = new_edge(bbn_at_hi[i], bbn_at_lo[i])     # b_{i+1} -> b_i
            ids.append(b_bn[i])
        internal.append(ids)
        for i in range(n):
            ra = rot_gamma[A[i]]
            ra.extend(ab_at_a[i])
            if i < n - 1:
                ra.extend(abn_at_a[i])
            rb = rot_gamma[B[i]]
            rb.extend(ab_at_b[i])
            if i > 0:
                rb.extend(abn_at_b[i - 1])
                rb.extend(bbn_at_hi[i - 1])
            if i < n - 1:
                rb.extend(bbn_at_lo[i])
    gamma = CombMap(rot_gamma, weights)
    m0 = 0
    for ids, A in zip(internal, cluster_a):
        for i in range(len(A)):
            m0 |= 1 << ids[i]
    return FisherGraph(G, gamma, cluster_a, cluster_b, half_of_a, a_of_half, cluster_of, internal, m0)


# ---------------------------------------------------------------------------
# matchings


def _adjacency(gamma: CombMap, edges: Optional[int] = None) -> Dict[int, List[Tuple[int, int]]]:
    adj: Dict[int, List[Tuple[int, int]]] = defaultdict(list)
    for e in (range(gamma.n_edges) if edges is None else bit_list(edges)):
        a, b = gamma.endpoints(e)
        adj[a].append((b, e))
        adj[b].append((a, e))
    return adj


def perfect_matchings(gamma: CombMap, cap: int = MATCHING_CAP, vertices=None,
                      edges: Optional[int] = None) -> Iterator[int]:
    """All perfect matchings (as edge chains) of the subgraph on ``vertices``
    using only edges in the chain ``edges`` (default: all).

    Backtracking that always branches on the uncovered vertex with the fewest
    available partners, so forced edges are taken first.
    """
    adj = _adjacency(gamma, edges)
    if vertices is None:
        vertices = range(gamma.n_vertices)
    free = set(vertices)
    count = [0]

    def rec(chain: int):
        if not free:
            count[0] += 1
            if count[0] > cap:
                raise CapacityError(f"more than {cap} perfect matchings")
            yield chain
            return
        best = None
        for v in free:
            opts = [(w, e) for w, e in adj[v] if w in free]
            if best is None or len(opts) < len(best[1]):
                best = (v, opts)
                if len(opts) <= 1:
                    break
        v, opts = best
        if not opts:
            return
        free.discard(v)
        for w, e in opts:
            free.discard(w)
            yield from rec(chain | (1 << e))
            free.add(w)
        free.add(v)

    yield from rec(0)


def is_perfect_matching(gamma: CombMap, chain: int) -> bool:
    seen = [0] * gamma.n_vertices
    for e in bit_list(chain):
        for v in gamma.endpoints(e):
            seen[v] += 1
    return all(c == 1 for c in seen)


def cycle_to_matching(F: FisherGraph, xi: int) -> int:
    """The unique perfect matching of Gamma whose external edges are ``xi``."""
    G, gamma = F.G, F.gamma
    if xi >> G.n_edges:
        raise ChainError("chain has bits beyond the edges of G")
    if not G.is_even(xi):
        raise ChainError("chain is not an even subgraph")
    covered = set()
    for e in bit_list(xi):
        covered.add(F.a_of_half[2 * e])
        covered.add(F.a_of_half[2 * e + 1])
    out = xi
    for A, B, ids in zip(F.cluster_a, F.cluster_b, F.internal_edges):
        rest = [u for u in A + B if u not in covered]
        inner = sum(1 << e for e in ids)
        found = list(_take(perfect_matchings(gamma, vertices=rest, edges=inner), 2))
        if len(found) != 1:
            raise AssertionError("gadget completion is not unique")
        out |= found[0]
    return out


def _take(it, k):
    for i, x in enumerate(it):
        if i >= k:
            return
        yield x


def matching_to_cycle(F: FisherGraph, M: int) -> int:
    return F.external_part(M)


# ---------------------------------------------------------------------------
# dimer partition functions


def z_dimer(F: FisherGraph, partial_by: Optional[Tuple[HomologyBasis, int]] = None,
            cap: int = MATCHING_CAP) -> GPoly:
    """Sum of x(M) over perfect matchings, optionally restricted to [M + M0] = alpha."""
    if partial_by is None:
        out = GPoly.zero()
        for M in perfect_matchings(F.gamma, cap):
            out = out + F.gamma.chain_weight(M)
        return out
    hb, alpha = partial_by
    return z_dimer_by_class(F, hb, cap)[alpha]


def z_dimer_by_class(F: FisherGraph, hb: HomologyBasis, cap: int = MATCHING_CAP) -> Dict[int, GPoly]:
    """Partial dimer sums keyed by the class of M + M0, in G's homology basis.

    Contracting each cluster (a disc) to its vertex maps M + M0 to its external
    edges, so classes are read from the external part of M.
    """
    out = {a: GPoly.zero() for a in range(1 << hb.rank)}
    for M in perfect_matchings(F.gamma, cap):
        alpha = homology_class(hb, F.external_part(M))
        out[alpha] = out[alpha] + F.gamma.chain_weight(M)
    return out
