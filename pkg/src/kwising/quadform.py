"""Mod-2 quadratic forms refining an intersection pairing."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

from .exactalg.gf2 import bit_list


class NotQuadraticError(ArithmeticError):
    pass


@dataclass(frozen=True)
class QuadForm2:
    """q(sum a_i b_i) = sum a_i q(b_i) + sum_{i<j} a_i a_j (b_i . b_j) mod 2.

    ``values`` is a bitmask of q on the basis; ``intersection`` the basis
    pairing matrix.
    """

    values: int
    intersection: Tuple[Tuple[int, ...], ...]

    @classmethod
    def make(cls, values, intersection) -> "QuadForm2":
        if not isinstance(values, int):
            values = sum((v & 1) << i for i, v in enumerate(values))
        return cls(values, tuple(tuple(r) for r in intersection))

    @property
    def rank(self) -> int:
        return len(self.intersection)

    def basis_values(self) -> List[int]:
        return [self.values >> i & 1 for i in range(self.rank)]

    def __call__(self, alpha: int) -> int:
        idx = bit_list(alpha)
        total = 0
        for i in idx:
            total ^= self.values >> i & 1
        for a, i in enumerate(idx):
            row = self.intersection[i]
            for j in idx[a + 1:]:
                total ^= row[j]
        return total

    def character_sum(self) -> int:
        return sum(1 - 2 * self(a) for a in range(1 << self.rank))


def arf(q: QuadForm2) -> int:
    """Arf invariant read off the normalized character sum (must be +-2^g)."""
    s = q.character_sum()
    g2 = q.rank
    if g2 % 2 or abs(s) != 1 << (g2 // 2):
        raise NotQuadraticError(f"character sum {s} is not +-2^g; form is degenerate")
    return 0 if s > 0 else 1


def all_refinements(intersection) -> List[QuadForm2]:
    """Every quadratic refinement of a given pairing (one per value vector)."""
    n = len(intersection)
    return [QuadForm2.make(v, intersection) for v in range(1 << n)]


def standard_symplectic(g: int) -> List[List[int]]:
    m = [[0] * (2 * g) for _ in range(2 * g)]
    for k in range(g):
        m[2 * k][2 * k + 1] = m[2 * k + 1][2 * k] = 1
    return m
