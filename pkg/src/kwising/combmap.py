"""Combinatorial maps: graphs with a rotation system on an oriented closed surface.

Edge ``k`` owns half-edges ``2k`` and ``2k+1`` (so ``mate(h) = h ^ 1``); half-edge
``2k`` is the "forward" orientation of the edge.  Each vertex carries the
counterclockwise cyclic order of its half-edges.  Chains over GF(2) are plain
Python ints with bit ``k`` standing for edge ``k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .exactalg.gf2 import GF2Reducer, bit_list
from .exactalg.poly import GPoly


class MapError(ValueError):
    """Malformed combinatorial map (bad involution, rotation or coordinates)."""


class ChainError(ValueError):
    """A chain violates a precondition (not even, not a simple cycle, ...)."""


def mate(h: int) -> int:
    return h ^ 1


def edge_of(h: int) -> int:
    return h >> 1


class CombMap:
    """A weighted graph together with a counterclockwise rotation per vertex.

    ``rotations[v]`` lists the half-edges at ``v``; ``weights[k]`` is the GPoly
    weight of edge ``k`` (default ``x{k+1}``); ``coords`` optionally maps each
    vertex to an exact planar point.
    """

    def __init__(self, rotations: Sequence[Sequence[int]], weights: Optional[Sequence] = None,
                 coords: Optional[Sequence[Tuple]] = None, edge_names: Optional[Sequence[str]] = None,
                 vertex_names: Optional[Sequence[str]] = None, half_names: Optional[Sequence[str]] = None):
        self.rotations: Tuple[Tuple[int, ...], ...] = tuple(tuple(r) for r in rotations)
        seen: Dict[int, int] = {}
        for v, rot in enumerate(self.rotations):
            for h in rot:
                if not isinstance(h, int) or h < 0:
                    raise MapError(f"bad half-edge id {h!r} at vertex {v}")
                if h in seen:
                    raise MapError(f"half-edge {h} appears at vertices {seen[h]} and {v}")
                seen[h] = v
        nh = len(seen)
        if nh % 2 or set(seen) != set(range(nh)):
            raise MapError("half-edges must be exactly 0..2E-1 (mate of h is h^1)")
        self.n_edges = nh // 2
        self.n_vertices = len(self.rotations)
        self._vertex = [0] * nh
        self._pos = [0] * nh
        for v, rot in enumerate(self.rotations):
            for i, h in enumerate(rot):
                self._vertex[h] = v
                self._pos[h] = i
        if weights is None:
            weights = [f"x{k + 1}" for k in range(self.n_edges)]
        if len(weights) != self.n_edges:
            raise MapError("one weight per edge is required")
        self.weights: Tuple[GPoly, ...] = tuple(_as_weight(w) for w in weights)
        self.edge_names = tuple(edge_names) if edge_names else tuple(str(k + 1) for k in range(self.n_edges))
        self.vertex_names = tuple(vertex_names) if vertex_names else tuple(str(v) for v in range(self.n_vertices))
        self.half_names = tuple(half_names) if half_names else None
        self.coords = None
        if coords is not None:
            self.coords = tuple((Fraction(x), Fraction(y)) for x, y in coords)
            self._check_coords()
        self._faces = None
        self._components = None

    # basic navigation -----------------------------------------------------
    @property
    def n_half_edges(self) -> int:
        return 2 * self.n_edges

    def vertex_of(self, h: int) -> int:
        return self._vertex[h]

    def succ(self, h: int) -> int:
        rot = self.rotations[self._vertex[h]]
        return rot[(self._pos[h] + 1) % len(rot)]

    def pred(self, h: int) -> int:
        rot = self.rotations[self._vertex[h]]
        return rot[(self._pos[h] - 1) % len(rot)]

    def position(self, h: int) -> int:
        return self._pos[h]

    def endpoints(self, e: int) -> Tuple[int, int]:
        return self._vertex[2 * e], self._vertex[2 * e + 1]

    def other_end(self, h: int) -> int:
        return self._vertex[h ^ 1]

    def degree(self, v: int) -> int:
        return len(self.rotations[v])

    def is_loop(self, e: int) -> bool:
        a, b = self.endpoints(e)
        return a == b

    def has_loops(self) -> bool:
        return any(self.is_loop(e) for e in range(self.n_edges))

    def weight_variables(self) -> List[str]:
        names = set()
        for w in self.weights:
            names.update(w.variables())
        from .exactalg.poly import _natural_key

        return sorted(names, key=_natural_key)

    def all_edges(self) -> int:
        return (1 << self.n_edges) - 1

    # faces and topology -----------------------------------------------------
    def face_next(self, h: int) -> int:
        return self.succ(h ^ 1)

    def faces(self) -> List[Tuple[int, ...]]:
        if self._faces is None:
            self._faces, _ = trace_faces(self)
        return self._faces

    def components(self) -> List[Tuple[List[int], List[int]]]:
        """Connected components as (vertex list, edge list), ordered by smallest vertex."""
        if self._components is None:
            parent = list(range(self.n_vertices))

            def find(x):
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            for e in range(self.n_edges):
                a, b = (find(u) for u in self.endpoints(e))
                if a != b:
                    parent[max(a, b)] = min(a, b)
            groups: Dict[int, Tuple[List[int], List[int]]] = {}
            for v in range(self.n_vertices):
                groups.setdefault(find(v), ([], []))[0].append(v)
            for e in range(self.n_edges):
                groups[find(self._vertex[2 * e])][1].append(e)
            self._components = [groups[r] for r in sorted(groups)]
        return self._components

    @property
    def genus(self) -> int:
        return trace_faces(self)[1]

    def boundary(self, chain: int) -> int:
        """Vertex bitset of odd-degree vertices of ``chain``."""
        out = 0
        for e in bit_list(chain):
            a, b = self.endpoints(e)
            out ^= (1 << a) ^ (1 << b)
        return out

    def is_even(self, chain: int) -> bool:
        return self.boundary(chain) == 0

    def chain_weight(self, chain: int) -> GPoly:
        out = GPoly.one()
        for e in bit_list(chain):
            out = out * self.weights[e]
        return out

    def spanning_forest(self) -> int:
        """Edges of the spanning forest grown by scanning edges in id order."""
        parent = list(range(self.n_vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        tree = 0
        for e in range(self.n_edges):
            a, b = (find(u) for u in self.endpoints(e))
            if a != b:
                parent[max(a, b)] = min(a, b)
                tree |= 1 << e
        return tree

    def tree_path(self, tree: int, u: int, v: int) -> int:
        """Chain of the unique path from u to v inside the forest ``tree``."""
        adj: Dict[int, List[Tuple[int, int]]] = {}
        for e in bit_list(tree):
            a, b = self.endpoints(e)
            adj.setdefault(a, []).append((b, e))
            adj.setdefault(b, []).append((a, e))
        prev = {u: None}
        stack = [u]
        while stack:
            x = stack.pop()
            if x == v:
                break
            for y, e in adj.get(x, ()):
                if y not in prev:
                    prev[y] = (x, e)
                    stack.append(y)
        if v not in prev:
            raise ChainError(f"vertices {u} and {v} are not connected in the forest")
        out = 0
        x = v
        while prev[x] is not None:
            x, e = prev[x]
            out ^= 1 << e
        return out

    def fundamental_cycles(self) -> List[Tuple[int, int]]:
        """(non-tree edge, fundamental cycle chain) pairs in edge order."""
        tree = self.spanning_forest()
        out = []
        for e in range(self.n_edges):
            if tree >> e & 1:
                continue
            a, b = self.endpoints(e)
            out.append((e, (1 << e) | self.tree_path(tree, a, b)))
        return out

    # geometry ----------------------------------------------------------------
    def _check_coords(self) -> None:
        if len(self.coords) != self.n_vertices:
            raise MapError("one coordinate pair per vertex is required")
        for v, rot in enumerate(self.rotations):
            angles = []
            for h in rot:
                dx, dy = self.direction(h)
                if dx == 0 and dy == 0:
                    raise MapError(f"edge {self.edge_names[h >> 1]} has coincident endpoints")
                angles.append((math.atan2(float(dy), float(dx)) % (2 * math.pi), h))
            if len({round(a, 12) for a, _ in angles}) != len(angles):
                raise MapError(f"overlapping edge directions at vertex {self.vertex_names[v]}")
            ordered = [h for _, h in sorted(angles)]
            if not _cyclic_equal(ordered, list(rot)):
                raise MapError(f"rotation at vertex {self.vertex_names[v]} is not the counterclockwise order of its edges")

    def direction(self, h: int) -> Tuple[Fraction, Fraction]:
        """Vector from the tail of ``h`` to its head (needs coordinates)."""
        x0, y0 = self.coords[self._vertex[h]]
        x1, y1 = self.coords[self._vertex[h ^ 1]]
        return x1 - x0, y1 - y0

    def with_weights(self, weights) -> "CombMap":
        return CombMap(self.rotations, weights, self.coords, self.edge_names, self.vertex_names, self.half_names)

    def __repr__(self):
        return f"CombMap(V={self.n_vertices}, E={self.n_edges}, genus={self.genus})"


def _cyclic_equal(a: List[int], b: List[int]) -> bool:
    if len(a) != len(b):
        return False
    if not a:
        return True
    try:
        k = b.index(a[0])
    except ValueError:
        return False
    return b[k:] + b[:k] == a


def _as_weight(w) -> GPoly:
    if isinstance(w, GPoly):
        return w
    if isinstance(w, str):
        from .exactalg.gaussrat import GaussRat

        s = w.strip()
        try:
            return GPoly.const(GaussRat.parse(s))
        except ValueError:
            return GPoly.var(s)
    return GPoly.lift(w)


# ---------------------------------------------------------------------------
# faces, genus


def trace_faces(m: CombMap) -> Tuple[List[Tuple[int, ...]], int]:
    """Face orbits of ``h -> succ(mate(h))`` and the total genus.

    Each orbit lists half-edges in traversal order, which walks the face
    clockwise (the face lies on the right).
    """
    seen = [False] * m.n_half_edges
    faces = []
    face_of = [0] * m.n_half_edges
    for h0 in range(m.n_half_edges):
        if seen[h0]:
            continue
        orbit = []
        h = h0
        while not seen[h]:
            seen[h] = True
            face_of[h] = len(faces)
            orbit.append(h)
            h = m.face_next(h)
        faces.append(tuple(orbit))
    genus = 0
    for verts, edges in m.components():
        if not edges:
            continue  # isolated vertex: a sphere with one face
        nf = len({face_of[2 * e] for e in edges} | {face_of[2 * e + 1] for e in edges})
        chi = len(verts) - len(edges) + nf
        if chi % 2:
            raise MapError("odd Euler characteristic")
        genus += (2 - chi) // 2
    return faces, genus


def face_chain(face: Sequence[int]) -> int:
    out = 0
    for h in face:
        out ^= 1 << (h >> 1)
    return out


def ccw_boundary(face: Sequence[int]) -> List[int]:
    """Half-edges of a traced face re-ordered along its counterclockwise boundary."""
    return [h ^ 1 for h in reversed(face)]


# ---------------------------------------------------------------------------
# cycles and homology


def cycle_decompose(m: CombMap, even: int) -> List[int]:
    """Split an even subgraph into edge-disjoint vertex-simple cycles.

    Walks from the smallest unused edge, always taking the smallest unused
    incident edge, and cuts off a cycle whenever the walk revisits a vertex.
    """
    if not m.is_even(even):
        raise ChainError("chain is not an even subgraph")
    rem = set(bit_list(even))
    inc: Dict[int, List[int]] = {}
    for e in sorted(rem):
        a, b = m.endpoints(e)
        inc.setdefault(a, []).append(e)
        if b != a:
            inc.setdefault(b, []).append(e)
    out = []
    while rem:
        e0 = min(rem)
        v = m.endpoints(e0)[0]
        path_v = [v]
        path_e: List[int] = []
        pos = {v: 0}
        onpath = set()
        while True:
            nxt = next((e for e in inc[v] if e in rem and e not in onpath), None)
            if nxt is None:
                break
            a, b = m.endpoints(nxt)
            w = b if a == v else a
            if w in pos:
                k = pos[w]
                cyc = path_e[k:] + [nxt]
                chain = 0
                for e in cyc:
                    chain |= 1 << e
                    rem.discard(e)
                    onpath.discard(e)
                out.append(chain)
                for u in path_v[k + 1:]:
                    del pos[u]
                path_v = path_v[:k + 1]
                path_e = path_e[:k]
                v = w
            else:
                path_e.append(nxt)
                onpath.add(nxt)
                path_v.append(w)
                pos[w] = len(path_v) - 1
                v = w
    return out


def oriented_cycle(m: CombMap, cycle: int) -> List[int]:
    """Outgoing half-edges along a vertex-simple cycle, starting at its smallest edge."""
    edges = bit_list(cycle)
    if not edges:
        return []
    e0 = min(edges)
    if len(edges) == 1:
        if not m.is_loop(e0):
            raise ChainError("a one-edge cycle must be a loop")
        return [2 * e0]
    at: Dict[int, List[int]] = {}
    for e in edges:
        a, b = m.endpoints(e)
        if a == b:
            raise ChainError("loop inside a longer cycle: not vertex-simple")
        at.setdefault(a, []).append(2 * e)
        at.setdefault(b, []).append(2 * e + 1)
    if any(len(hs) != 2 for hs in at.values()):
        raise ChainError("chain is not a vertex-simple cycle")
    out = [2 * e0]
    h = 2 * e0
    while True:
        w = m.vertex_of(h ^ 1)
        pair = at[w]
        h = pair[0] if pair[1] == h ^ 1 else pair[1]
        if h == 2 * e0:
            break
        out.append(h)
        if len(out) > len(edges):
            raise ChainError("chain is not a single cycle")
    if len(out) != len(edges):
        raise ChainError("chain is not a single cycle")
    return out


def _open_ccw_interval(m: CombMap, start: int, stop: int) -> List[int]:
    """Half-edges strictly between ``start`` and ``stop`` going counterclockwise."""
    out = []
    h = m.succ(start)
    while h != stop:
        out.append(h)
        h = m.succ(h)
    return out


def left_halfedges(m: CombMap, walk: Sequence[int]) -> List[Tuple[int, List[int]]]:
    """For each vertex of an oriented simple cycle, the half-edges on its left.

    ``walk`` lists outgoing half-edges; at the vertex reached by ``walk[i-1]``
    the incoming half-edge is ``walk[i-1] ^ 1`` and the left side is the open
    counterclockwise interval from the outgoing to the incoming half-edge.
    """
    out = []
    n = len(walk)
    for i in range(n):
        hout = walk[i]
        hin = walk[i - 1] ^ 1
        out.append((m.vertex_of(hout), _open_ccw_interval(m, hout, hin)))
    return out


def pushoff_intersection(m: CombMap, cycle: int, other: int) -> int:
    """Mod-2 intersection of a simple cycle with any even chain.

    Pushes ``cycle`` slightly to its left and counts crossings with ``other``;
    no edge-disjointness is needed.
    """
    walk = oriented_cycle(m, cycle)
    total = 0
    for _, hs in left_halfedges(m, walk):
        for h in hs:
            total ^= (other >> (h >> 1)) & 1
    return total


def intersect_mod2(m: CombMap, C: int, D: int) -> int:
    """Interleaving count of two edge-disjoint simple cycles at shared vertices."""
    if C & D:
        raise ChainError("cycles share an edge; decompose first")
    hc = _halfedges_by_vertex(m, C)
    hd = _halfedges_by_vertex(m, D)
    total = 0
    for v in set(hc) & set(hd):
        c1, c2 = hc[v]
        d1, d2 = hd[v]
        p = m.position
        lo, hi = sorted((p(c1), p(c2)))
        inside = sum(1 for d in (d1, d2) if lo < p(d) < hi)
        total ^= inside & 1
    return total


def _halfedges_by_vertex(m: CombMap, cycle: int) -> Dict[int, List[int]]:
    out: Dict[int, List[int]] = {}
    for e in bit_list(cycle):
        for h in (2 * e, 2 * e + 1):
            out.setdefault(m.vertex_of(h), []).append(h)
    for v, hs in out.items():
        if len(hs) != 2:
            raise ChainError("chain is not a vertex-simple cycle")
    return out


@dataclass
class HomologyBasis:
    """Mod-2 homology of an embedded graph.

    ``basis`` holds 2g simple cycles, ``face_space`` the face boundaries and
    ``intersection`` the 2g x 2g GF(2) intersection matrix.
    """

    cmap: CombMap
    basis: List[int]
    face_space: List[int]
    intersection: List[List[int]]
    _reducer: GF2Reducer = field(repr=False, default=None)

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def genus(self) -> int:
        return len(self.basis) // 2


def homology_basis(m: CombMap) -> HomologyBasis:
    faces, genus = trace_faces(m)
    face_chains = [face_chain(f) for f in faces]
    red = GF2Reducer()
    for c in face_chains:
        red.add(c, 0)
    basis = []
    for _, cyc in m.fundamental_cycles():
        if len(basis) == 2 * genus:
            break
        if red.add(cyc, 1 << len(basis)):
            basis.append(cyc)
    if len(basis) != 2 * genus:
        raise MapError("homology rank does not match the genus")
    inter = [[pushoff_intersection(m, a, b) for b in basis] for a in basis]
    return HomologyBasis(m, basis, face_chains, inter, red)


def homology_class(hb: HomologyBasis, cycle: int) -> int:
    """Coordinates (bit i = coefficient of basis[i]) of an even chain's class."""
    if not hb.cmap.is_even(cycle):
        raise ChainError("chain is not an even subgraph")
    rest, tag = hb._reducer.reduce(cycle)
    if rest:
        raise ChainError("even chain outside the span of faces and basis")
    return tag


def intersection_form(hb: HomologyBasis, a: int, b: int) -> int:
    """Bilinear intersection pairing of two classes given in basis coordinates."""
    total = 0
    for i in bit_list(a):
        row = hb.intersection[i]
        for j in bit_list(b):
            total ^= row[j]
    return total
