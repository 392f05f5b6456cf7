"""Map generators: toroidal lattices, planar grids, random planar and random rotation systems."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .combmap import CombMap


def torus_lattice(N: int, weight=None) -> CombMap:
    """N x N square lattice on the torus (N >= 1, 2N^2 edges).

    Vertex ``v = i + N*j`` owns edge ``2v`` (east) and ``2v+1`` (north); its
    rotation is east, north, west, south.
    """
    if N < 1:
        raise ValueError("N must be positive")
    rot = []
    for j in range(N):
        for i in range(N):
            v = i + N * j
            west = (i - 1) % N + N * j
            south = i + N * ((j - 1) % N)
            rot.append([4 * v, 2 * (2 * v + 1), 4 * west + 1, 2 * (2 * south + 1) + 1])
    weights = None if weight is None else [weight] * (2 * N * N)
    return CombMap(rot, weights)


def grid_graph(rows: int, cols: int, weights=None) -> CombMap:
    """Planar rows x cols grid with integer coordinates."""
    coords = [(c, r) for r in range(rows) for c in range(cols)]
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return straight_line_map(coords, edges, weights)


def straight_line_map(coords: Sequence[Tuple], edges: Sequence[Tuple[int, int]], weights=None) -> CombMap:
    """Planar map of a straight-line drawing; rotations sorted by angle."""
    at: List[List[Tuple[float, int]]] = [[] for _ in coords]
    for k, (a, b) in enumerate(edges):
        for h, (u, w) in ((2 * k, (a, b)), (2 * k + 1, (b, a))):
            dx = coords[w][0] - coords[u][0]
            dy = coords[w][1] - coords[u][1]
            at[u].append((math.atan2(dy, dx) % (2 * math.pi), h))
    rot = [[h for _, h in sorted(hs)] for hs in at]
    return CombMap(rot, weights, coords=coords)


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _segments_cross(p, q, r, s) -> bool:
    # proper crossing only; shared endpoints are allowed
    if len({p, q, r, s}) < 4:
        return False
    d1, d2 = _cross(p, q, r), _cross(p, q, s)
    d3, d4 = _cross(r, s, p), _cross(r, s, q)
    return d1 * d2 < 0 and d3 * d4 < 0


def random_planar_graph(rng: random.Random, n_vertices: int, n_edges: int, box: int = 20) -> CombMap:
    """Random straight-line planar graph on points in general position."""
    pts: List[Tuple[int, int]] = []
    while len(pts) < n_vertices:
        p = (rng.randrange(box), rng.randrange(box))
        if p in pts:
            continue
        if any(_cross(a, b, p) == 0 for i, a in enumerate(pts) for b in pts[i + 1:]):
            continue
        pts.append(p)
    pairs = [(a, b) for a in range(n_vertices) for b in range(a + 1, n_vertices)]
    rng.shuffle(pairs)
    edges: List[Tuple[int, int]] = []
    for a, b in pairs:
        if len(edges) == n_edges:
            break
        if any(_segments_cross(pts[a], pts[b], pts[c], pts[d]) for c, d in edges):
            continue
        edges.append((a, b))
    return straight_line_map(pts, edges)


def random_rotation_system(rng: random.Random, n_vertices: int, n_edges: int, connected: bool = True) -> CombMap:
    """Random multigraph (loops allowed) with uniformly shuffled rotations."""
    if connected and n_edges < n_vertices - 1:
        raise ValueError("too few edges for a connected graph")
    ends = []
    if connected:
        for v in range(1, n_vertices):
            ends.append((rng.randrange(v), v))
    while len(ends) < n_edges:
        ends.append((rng.randrange(n_vertices), rng.randrange(n_vertices)))
    rng.shuffle(ends)
    rot: List[List[int]] = [[] for _ in range(n_vertices)]
    for k, (a, b) in enumerate(ends):
        rot[a].append(2 * k)
        rot[b].append(2 * k + 1)
    for r in rot:
        rng.shuffle(r)
    return CombMap(rot)


@dataclass
class CorpusConfig:
    seed: int = 2024
    genus_counts: Tuple[int, ...] = (16, 16, 12, 8)   # maps of genus 0, 1, 2, 3
    max_edges: int = 8


def random_corpus(cfg: Optional[CorpusConfig] = None) -> List[CombMap]:
    """Connected random rotation systems with at most ``max_edges`` edges, by genus."""
    cfg = cfg or CorpusConfig()
    rng = random.Random(cfg.seed)
    out: List[CombMap] = []
    for g, count in enumerate(cfg.genus_counts):
        got = 0
        while got < count:
            # genus g needs E - V + 1 >= 2g
            E = rng.randint(max(1, 2 * g), cfg.max_edges)
            V = rng.randint(1, min(E + 1, E - 2 * g + 1))
            m = random_rotation_system(rng, V, E)
            if m.genus == g:
                out.append(m)
                got += 1
    return out
