"""Brute-force Ising oracles: sums over even subgraphs (1-cycles mod 2)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional

from .combmap import CombMap, HomologyBasis, homology_class
from .exactalg.gf2 import bit_list
from .exactalg.linalg import CapacityError
from .exactalg.poly import GPoly
from .quadform import QuadForm2

BRUTE_FORCE_CAP = 22


@dataclass
class EvenSubgraphSpace:
    cmap: CombMap
    basis: List[int]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def __len__(self):
        return 1 << len(self.basis)

    def gray(self):
        """Yield (chain, flipped basis index or None) in Gray-code order."""
        chain = 0
        yield chain, None
        for k in range(1, 1 << len(self.basis)):
            i = (k & -k).bit_length() - 1
            chain ^= self.basis[i]
            yield chain, i


def even_subgraphs(G: CombMap, cap: int = BRUTE_FORCE_CAP) -> EvenSubgraphSpace:
    basis = [c for _, c in G.fundamental_cycles()]
    if len(basis) > cap:
        raise CapacityError(f"cycle space dimension {len(basis)} exceeds brute-force cap {cap}")
    return EvenSubgraphSpace(G, basis)


class _WeightSum:
    # accumulates x(chain) sums; monomial weights take a fast packed-int path
    HIST_MAX = 4   # at most this many distinct weights: count edges per weight instead

    def __init__(self, G: CombMap):
        self.G = G
        self.hist = None
        distinct: Dict[GPoly, int] = {}
        for e, w in enumerate(G.weights):
            distinct[w] = distinct.get(w, 0) | 1 << e
        if len(distinct) <= self.HIST_MAX:
            self.hist = list(distinct.items())
            self.masks = [m for _, m in self.hist]
            self.acc = {}
            return
        self.fast = []
        for w in G.weights:
            ms = w.monomials()
            if len(ms) == 1:
                (m,) = ms
                self.fast.append((m, w.coeff(m)))
            else:
                self.fast = None
                break
        self.acc: Dict[int, object] = {}
        self.slow = GPoly.zero()

    def add(self, chain: int, sign: int = 1) -> None:
        if self.hist is not None:
            key = tuple((chain & m).bit_count() for m in self.masks)
            self.acc[key] = self.acc.get(key, 0) + sign
            return
        if self.fast is None:
            term = self.G.chain_weight(chain)
            self.slow = self.slow + (term if sign > 0 else -term)
            return
        mono = 0
        coeff = None
        for e in bit_list(chain):
            m, c = self.fast[e]
            mono += m
            coeff = c if coeff is None else coeff * c
        key = mono
        if coeff is None:
            val = sign
        else:
            val = coeff if sign > 0 else -coeff
        self.acc[key] = self.acc.get(key, 0) + val

    def result(self) -> GPoly:
        if self.hist is not None:
            out = GPoly.zero()
            powers = [[GPoly.one()] for _ in self.hist]
            for key, count in sorted(self.acc.items()):
                if not count:
                    continue
                term = GPoly.const(count)
                for k, n in enumerate(key):
                    pw = powers[k]
                    while len(pw) <= n:
                        pw.append(pw[-1] * self.hist[k][0])
                    term = term * pw[n]
                out = out + term
            return out
        if self.fast is None:
            return self.slow
        re, im = {}, {}
        for m, c in self.acc.items():
            if isinstance(c, int):
                re[m] = c
            else:
                re[m] = c.re
                im[m] = c.im
        return GPoly(re, im)


def z_ising(G: CombMap, cap: int = BRUTE_FORCE_CAP) -> GPoly:
    """Sum over all even subgraphs of the product of their edge weights."""
    space = even_subgraphs(G, cap)
    acc = _WeightSum(G)
    for chain, _ in space.gray():
        acc.add(chain)
    return acc.result()


def z_ising_by_class(G: CombMap, hb: HomologyBasis, cap: int = BRUTE_FORCE_CAP) -> Dict[int, GPoly]:
    """Partial partition functions for every homology class (keys are coordinates)."""
    space = even_subgraphs(G, cap)
    cls = [homology_class(hb, c) for c in space.basis]
    accs: Dict[int, _WeightSum] = {}
    alpha = 0
    for chain, i in space.gray():
        if i is not None:
            alpha ^= cls[i]
        accs.setdefault(alpha, _WeightSum(G)).add(chain)
    out = {a: GPoly.zero() for a in range(1 << hb.rank)}
    for a, acc in accs.items():
        out[a] = acc.result()
    return out


def z_ising_partial(G: CombMap, hb: HomologyBasis, alpha: int, cap: int = BRUTE_FORCE_CAP) -> GPoly:
    return z_ising_by_class(G, hb, cap)[alpha]


def z_twisted(G: CombMap, hb: HomologyBasis, q: QuadForm2, cap: int = BRUTE_FORCE_CAP,
              partials: Optional[Dict[int, GPoly]] = None) -> GPoly:
    """Even-subgraph sum with each term signed by (-1)^q([xi])."""
    if partials is None:
        partials = z_ising_by_class(G, hb, cap)
    out = GPoly.zero()
    for a, p in partials.items():
        out = out - p if q(a) else out + p
    return out
