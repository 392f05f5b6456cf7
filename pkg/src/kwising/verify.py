"""Invariant suite shared by the command line and the tests."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from .combmap import CombMap, cycle_decompose, intersection_form
from .exactalg.gaussrat import GaussRat
from .exactalg.linalg import CapacityError, NotASquareError, det, pfaffian, series_sqrt_residual
from .exactalg.poly import GPoly
from .fisher import MATCHING_CAP, cycle_to_matching, z_dimer_by_class
from .ising import BRUTE_FORCE_CAP, z_ising, z_ising_by_class, z_twisted
from .kacward import (
    KacWardSetup,
    class_determinants,
    kw_matrix,
    kw_matrix_planar_geometric,
    setup,
    z_ising_kacward,
)
from .kasteleyn import cluster_block, is_kasteleyn, q_from_cycles, z_dimer_pfaffian

PASS, FAIL, SKIP = "pass", "fail", "skip"


@dataclass
class Check:
    name: str
    status: str
    detail: str = ""


@dataclass
class VerifyConfig:
    level: str = "quick"          # quick | full
    seed: int = 0
    n_points: int = 5             # evaluation points when symbolic is out of reach
    bass_len: int = 6
    bass_budget: int = 3000       # lower the path length until about this many paths remain
    brute_cap: int = BRUTE_FORCE_CAP
    matching_cap: int = MATCHING_CAP
    geometric_tol: float = 1e-9
    only: Optional[Tuple[str, ...]] = None   # run just these checks


def random_point(names, rng: random.Random, complex_parts: bool = True) -> Dict[str, GaussRat]:
    """Small-height Gaussian rationals, one per variable, in sorted name order."""
    pt = {}
    for v in names:
        re = Fraction(rng.randint(-4, 4), rng.randint(1, 5))
        im = Fraction(rng.randint(-4, 4), rng.randint(1, 5)) if complex_parts else 0
        pt[v] = GaussRat(re, im)
    return pt


class _Suite:
    def __init__(self, G: CombMap, cfg: VerifyConfig, ks: Optional[KacWardSetup] = None):
        self.G, self.cfg = G, cfg
        self.ks = ks or setup(G)
        self.checks: List[Check] = []
        self._partials = None
        self._dimer = None
        self._roots = None
        self._dets = None

    def run(self, name: str, fn: Callable[[], Optional[str]]) -> None:
        if self.cfg.only is not None and name not in self.cfg.only:
            return
        try:
            msg = fn()
        except (CapacityError, OverflowError) as exc:
            self.checks.append(Check(name, SKIP, str(exc)))
            return
        except (AssertionError, NotASquareError) as exc:
            self.checks.append(Check(name, FAIL, str(exc) or "assertion failed"))
            return
        self.checks.append(Check(name, PASS, msg or ""))

    # cached pieces -------------------------------------------------------
    def partials(self):
        if self._partials is None:
            self._partials = z_ising_by_class(self.ks.H, self.ks.hb, self.cfg.brute_cap)
        return self._partials

    def dimer_partials(self):
        if self._dimer is None:
            self._dimer = z_dimer_by_class(self.ks.F, self.ks.hb, self.cfg.matching_cap)
        return self._dimer

    def dets(self):
        if self._dets is None:
            self._dets = class_determinants(self.ks.F, self.ks.classes)
        return self._dets

    def roots(self):
        """Exact square roots of all class determinants (raises if one is not a square)."""
        if self._roots is None:
            F, classes = self.ks.F, self.ks.classes
            size = kw_matrix(F, classes[0].K).size
            out = []
            for c, D in zip(classes, self.dets()):
                Q, res = series_sqrt_residual(D, max(size // 2, (D.total_degree() + 1) // 2))
                if not res.is_zero():
                    raise NotASquareError(f"class {c.K.class_id}: nonzero residual {res}")
                out.append(Q)
            self._roots = out
        return self._roots


def _q_direct(F, K, xi: int) -> int:
    comps = cycle_decompose(F.gamma, cycle_to_matching(F, xi) ^ F.m0)
    return q_from_cycles(F.gamma, K.bits, F.m0, comps)


def run_checks(G: CombMap, cfg: Optional[VerifyConfig] = None, ks: Optional[KacWardSetup] = None) -> List[Check]:
    cfg = cfg or VerifyConfig()
    s = _Suite(G, cfg, ks)
    ks = s.ks
    F, hb, classes = ks.F, ks.hb, ks.classes
    g = ks.genus
    rng = random.Random(cfg.seed)

    def kasteleyn():
        for c in classes:
            assert is_kasteleyn(F.gamma, c.K.bits), f"class {c.K.class_id} is not Kasteleyn"
        return f"{len(classes)} classes"

    def forms():
        vals = [c.q.values for c in classes]
        assert len(set(vals)) == len(vals) == 1 << (2 * g), "forms are not pairwise distinct"
        n_even = sum(1 for c in classes if c.arf == 0)
        want = (1 << (g - 1)) * ((1 << g) + 1) if g else 1
        assert n_even == want, f"{n_even} even forms, expected {want}"
        return f"{n_even} even of {len(vals)}"

    def quadratic():
        # q evaluated on actual cycles: quadratic over the intersection form and
        # independent of the representative (adding a face boundary)
        reps = []
        for a in range(1 << hb.rank):
            xi = 0
            for i, b in enumerate(hb.basis):
                if a >> i & 1:
                    xi ^= b
            reps.append(xi)
        faces = hb.face_space[:4]
        n = len(reps)
        dot = [[intersection_form(hb, a, b) for b in range(n)] for a in range(n)]
        for c in classes:
            q = [_q_direct(F, c.K, xi) for xi in reps]
            for a in range(n):
                assert q[a] == c.q(a), f"class {c.K.class_id}: q differs from its basis extension at {a}"
                for b in range(n):
                    assert q[a ^ b] ^ q[a] ^ q[b] == dot[a][b], "q is not quadratic"
            for a in range(1, min(n, 9)):
                for f in faces:
                    assert _q_direct(F, c.K, reps[a] ^ f) == q[a], "q depends on the representative"
        return ""

    def eps():
        bad = [c.K.class_id for c in classes if c.eps_m0 != 1]
        assert not bad, f"eps(M0) = -1 for classes {bad}"
        return ""

    def cluster_pf():
        degs = sorted({F.G.degree(v) for v in range(F.G.n_vertices)} - {0})
        for n in degs:
            assert pfaffian(cluster_block(n)) == GPoly.one(), f"Pf of the degree-{n} cluster is not 1"
        return f"degrees {degs}"

    def three_way():
        try:
            a = z_ising(G, cfg.brute_cap)
            b = GPoly.zero()
            for c, root in zip(classes, s.roots()):
                b = b - root if c.arf else b + root
            b = b.scale(Fraction(1, 1 << g))
            c = z_dimer_pfaffian(F, classes=classes)
            assert a == b == c, f"symbolic mismatch: {a} | {b} | {c}"
            return "symbolic"
        except (CapacityError, NotASquareError):
            pass
        names = G.weight_variables()
        brute = None
        try:
            brute = z_ising(G, cfg.brute_cap)
        except CapacityError:
            pass
        for _ in range(cfg.n_points):
            pt = random_point(names, rng)
            vals = [z_ising_kacward(G, "evaluated", pt, ks=ks), z_dimer_pfaffian(F, "evaluated", pt, classes)]
            if brute is not None:
                vals.append(brute.evaluate(pt))
            assert all(v == vals[0] for v in vals), f"evaluated mismatch at {pt}"
        return f"evaluated at {cfg.n_points} points" + ("" if brute is not None else " (no brute force)")

    s.run("kasteleyn", kasteleyn)
    s.run("forms", forms)
    s.run("quadratic", quadratic)
    s.run("eps_m0", eps)
    s.run("cluster_pfaffian", cluster_pf)
    s.run("three_way", three_way)
    if cfg.level != "full":
        return s.checks

    def perfect_square():
        s.roots()
        return f"{len(classes)} determinants"

    def prop47():
        for c, root in zip(classes, s.roots()):
            assert c.eps_m0 * pfaffian(c.matrix) == root, f"class {c.K.class_id}: eps Pf != det^(1/2)"
        return ""

    def eq41():
        zi, zd = s.partials(), s.dimer_partials()
        for a in range(1 << hb.rank):
            assert zi[a] == zd[a], f"class {a}: Ising and dimer partial sums differ"
        return ""

    def eq46():
        zd = s.dimer_partials()
        for c in classes:
            rhs = GPoly.zero()
            for a, p in zd.items():
                rhs = rhs - p if c.q(a) else rhs + p
            assert c.eps_m0 * pfaffian(c.matrix) == rhs, f"class {c.K.class_id}: linear relation fails"
        return ""

    def twisted():
        parts = s.partials()
        for c, root in zip(classes, s.roots()):
            assert root == z_twisted(ks.H, hb, c.q, partials=parts), f"class {c.K.class_id}: root != twisted sum"
        return ""

    def bass():
        from .zeta import verify_bass

        L = bass_length(ks.H, cfg.bass_len, max(cfg.bass_budget * 4 // len(classes), 300))
        for c in classes:
            r = verify_bass(F, c.K, L)
            assert r.ok, f"class {c.K.class_id}: first mismatch {r.first_mismatch}"
            assert r.signs_ok, f"class {c.K.class_id}: a path sign is not +-1"
        return f"L={L}"

    def geometric():
        if G.coords is None or g != 0:
            raise CapacityError("needs planar coordinates")
        import numpy as np

        names = G.weight_variables()
        pt = {v: rng.uniform(0.1, 0.9) for v in names}
        geo = complex(np.linalg.det(kw_matrix_planar_geometric(G, pt)))
        exact = det(kw_matrix(F, classes[0].K).matrix, "evaluated",
                    {k: GaussRat(Fraction(v)) for k, v in pt.items()})
        ex = complex(float(exact.re), float(exact.im))
        rel = abs(geo - ex) / abs(ex)
        assert rel <= cfg.geometric_tol, f"relative difference {rel:.3g}"
        return f"relative difference {rel:.2e}"

    s.run("perfect_square", perfect_square)
    s.run("prop47", prop47)
    s.run("refined_equality", eq41)
    s.run("linear_relation", eq46)
    s.run("twisted_root", twisted)
    s.run("bass", bass)
    s.run("geometric", geometric)
    return s.checks


def bass_length(G: CombMap, L: int, budget: int) -> int:
    """Largest length <= L whose closed non-backtracking walk count / length stays within budget."""
    import numpy as np

    n = 2 * G.n_edges
    live = [h for h in range(n) if not G.weights[h >> 1].is_zero()]
    idx = {h: k for k, h in enumerate(live)}
    N = np.zeros((len(live), len(live)), dtype=float)
    for h in live:
        head = G.vertex_of(h ^ 1)
        for h2 in live:
            if G.vertex_of(h2) == head and h2 != h ^ 1:
                N[idx[h], idx[h2]] = 1
    P = np.eye(len(live))
    total = 0.0
    for ell in range(1, L + 1):
        P = P @ N
        total += np.trace(P) / ell
        if total > budget:
            return max(ell - 1, 2)
    return L


def all_passed(checks: List[Check]) -> bool:
    return all(c.status != FAIL for c in checks)
