"""GF(2) linear algebra on Python-int bitsets (bit j of a row = column j)."""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple


def bits_from(indices) -> int:
    v = 0
    for i in indices:
        v ^= 1 << i
    return v


def bit_list(v: int) -> List[int]:
    out = []
    while v:
        low = v & -v
        out.append(low.bit_length() - 1)
        v ^= low
    return out


def gf2_rank(rows: Sequence[int]) -> int:
    basis: dict = {}
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top in basis:
                r ^= basis[top]
            else:
                basis[top] = r
                break
    return len(basis)


def gf2_solve(rows: Sequence[int], rhs: Sequence[int], ncols: int) -> Tuple[Optional[int], List[int]]:
    """Solve A x = b over GF(2).

    ``rows[i]`` is row i of A as a bitset over ``ncols`` columns and
    ``rhs[i]`` the matching bit of b.  Returns ``(x, kernel)`` where ``x`` is a
    bitset solution or ``None`` when the system is infeasible, and ``kernel``
    is a basis of the null space of A.
    """
    aug = ncols
    work = [r | ((b & 1) << aug) for r, b in zip(rows, rhs)]
    pivots: List[Tuple[int, int]] = []  # (column, row index in work)
    rank = 0
    for col in range(ncols):
        mask = 1 << col
        sel = next((i for i in range(rank, len(work)) if work[i] & mask), None)
        if sel is None:
            continue
        work[rank], work[sel] = work[sel], work[rank]
        pr = work[rank]
        for i in range(len(work)):
            if i != rank and work[i] & mask:
                work[i] ^= pr
        pivots.append((col, rank))
        rank += 1
    for i in range(rank, len(work)):
        if work[i] >> aug & 1:
            return None, _kernel(work, pivots, ncols)
    x = 0
    for col, r in pivots:
        if work[r] >> aug & 1:
            x |= 1 << col
    return x, _kernel(work, pivots, ncols)


def _kernel(work, pivots, ncols) -> List[int]:
    pivot_cols = {c for c, _ in pivots}
    out = []
    for free in range(ncols):
        if free in pivot_cols:
            continue
        v = 1 << free
        for col, r in pivots:
            if work[r] >> free & 1:
                v |= 1 << col
        out.append(v)
    return out


class GF2Reducer:
    """Incremental echelon basis that remembers how each vector was combined.

    ``add(v, tag)`` inserts ``v``; ``reduce(v)`` returns the residual of ``v``
    and the XOR of tags of basis vectors used (tags are bitsets).
    """

    def __init__(self):
        self._basis: dict = {}  # leading bit -> (vector, tag)

    def __len__(self):
        return len(self._basis)

    def reduce(self, v: int) -> Tuple[int, int]:
        tag = 0
        while v:
            top = v.bit_length() - 1
            hit = self._basis.get(top)
            if hit is None:
                break
            v ^= hit[0]
            tag ^= hit[1]
        return v, tag

    def reduce_full(self, v: int) -> Tuple[int, int]:
        """Like ``reduce`` but clears every basis leading bit, not just the top."""
        tag = 0
        for top in sorted(self._basis, reverse=True):
            if v >> top & 1:
                vec, t = self._basis[top]
                v ^= vec
                tag ^= t
        return v, tag

    def add(self, v: int, tag: int) -> bool:
        r, t = self.reduce(v)
        if not r:
            return False
        self._basis[r.bit_length() - 1] = (r, tag ^ t)
        return True
