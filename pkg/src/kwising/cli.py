"""Command-line driver: ``kwising <command> ...``.

Exit codes: 0 success, 1 a verification or cross-check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from typing import Dict, List, Optional

from .combmap import CombMap
from .exactalg.gaussrat import GaussRat
from .exactalg.linalg import CapacityError
from .exactalg.poly import GPoly
from .mapfile import MapFileError, read_map

METHODS = ("brute", "kacward", "pfaffian")


class InputError(Exception):
    pass


def poly_json(p: GPoly):
    return [{"exponents": e, "coeff": c} for e, c in p.term_list()]


def scalar_json(z: GaussRat):
    return {"re": str(z.re), "im": str(z.im)}


def _load(path: str) -> CombMap:
    try:
        return read_map(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except MapFileError as exc:
        raise InputError(f"{path}: {exc}") from None


def parse_point(text: str, names: List[str], seed: int) -> Dict[str, GaussRat]:
    """``k=v,...`` assignments; ``random`` or unassigned variables draw from the seeded generator."""
    from .verify import random_point

    pt = random_point(names, random.Random(seed))
    if text == "random":
        return pt
    given = {}
    for item in text.split(","):
        if "=" not in item:
            raise InputError(f"bad assignment {item!r}, expected name=value")
        k, v = (s.strip() for s in item.split("=", 1))
        try:
            given[k] = GaussRat.parse(v)
        except ValueError:
            raise InputError(f"bad value {v!r} for {k}") from None
    unknown = sorted(set(given) - set(names))
    if unknown:
        raise InputError(f"unknown variables {unknown}")
    pt.update(given)
    return pt


# ---------------------------------------------------------------------------
# commands


def cmd_partition(args) -> (int, dict):
    G = _load(args.file)
    methods = METHODS if args.method == "all" else (args.method,)
    point = None
    if args.eval is not None:
        point = parse_point(args.eval, G.weight_variables(), args.seed)
    from .ising import z_ising
    from .kacward import setup, z_ising_kacward
    from .kasteleyn import z_dimer_pfaffian

    ks = setup(G)
    results, timings, values = {}, {}, {}
    for m in methods:
        t = time.perf_counter()
        try:
            if m == "brute":
                z = z_ising(G)
                v = z if point is None else z.evaluate(point)
            elif m == "kacward":
                v = z_ising_kacward(G, "symbolic", ks=ks) if point is None else \
                    z_ising_kacward(G, "evaluated", point, ks=ks)
            else:
                v = z_dimer_pfaffian(ks.F, "symbolic", classes=ks.classes) if point is None else \
                    z_dimer_pfaffian(ks.F, "evaluated", point, ks.classes)
        except CapacityError as exc:
            results[m] = {"status": "skipped", "reason": str(exc)}
            continue
        finally:
            timings[m] = time.perf_counter() - t
        values[m] = v
        results[m] = {"status": "ok", "value": str(v),
                      "terms" if point is None else "scalar": poly_json(v) if point is None else scalar_json(v)}
    agree = len({str(v) for v in values.values()}) <= 1
    report = {
        "command": "partition",
        "genus": G.genus,
        "mode": "symbolic" if point is None else "evaluated",
        "point": None if point is None else {k: str(v) for k, v in sorted(point.items())},
        "results": results,
        "agree": agree,
    }
    if args.timings:
        report["timings"] = timings
    if not args.json:
        if point is not None:
            print("point: " + ", ".join(f"{k}={v}" for k, v in sorted(point.items())))
        for m in methods:
            r = results[m]
            print(f"{m:9s} {r['value'] if r['status'] == 'ok' else 'skipped: ' + r['reason']}")
        if len(values) > 1:
            print("methods agree" if agree else "METHODS DISAGREE")
    return (0 if agree else 1), report


def _class_rows(ks) -> List[dict]:
    return [{"class": c.K.class_id, "arf": c.arf, "q_basis": c.q.basis_values(),
             "eps_m0": c.eps_m0} for c in ks.classes]


def cmd_spins(args):
    from .kacward import setup

    G = _load(args.file)
    ks = setup(G)
    rows = _class_rows(ks)
    if not args.json:
        print(f"genus {ks.genus}, {len(rows)} spin classes")
        for r in rows:
            q = "".join(map(str, r["q_basis"])) or "-"
            print(f"  class {r['class']:3d}  arf {r['arf']}  q on basis {q}")
    return 0, {"command": "spins", "genus": ks.genus, "classes": rows}


def _pick_class(ks, idx):
    if not 0 <= idx < len(ks.classes):
        raise InputError(f"spin index {idx} out of range 0..{len(ks.classes) - 1}")
    return ks.classes[idx]


def cmd_matrices(args):
    from .kacward import kw_matrix, setup

    G = _load(args.file)
    ks = setup(G)
    c = _pick_class(ks, args.spin)
    KW = kw_matrix(ks.F, c.K)
    kw_entries = sorted((i, j, str(p)) for (i, j), p in KW.matrix.entries.items())
    ka_entries = sorted((i, j, str(p)) for (i, j), p in c.matrix.upper.items())
    if not args.json:
        print(f"Kac-Ward matrix B, class {c.K.class_id}, size {KW.size} (rows indexed by half-edges)")
        for i, j, p in kw_entries:
            print(f"  {i:4d} {j:4d}  {p}")
        print(f"Kasteleyn matrix A, size {c.matrix.size} (upper triangle)")
        for i, j, p in ka_entries:
            print(f"  {i:4d} {j:4d}  {p}")
    report = {"command": "matrices", "class": c.K.class_id,
              "kacward": {"size": KW.size, "half_edges": KW.half_edges, "entries": kw_entries},
              "kasteleyn": {"size": c.matrix.size, "entries": ka_entries}}
    return 0, report


def cmd_verify(args):
    from .verify import FAIL, VerifyConfig, run_checks

    G = _load(args.file)
    only = tuple(args.only.split(",")) if args.only else None
    checks = run_checks(G, VerifyConfig(level=args.level, seed=args.seed, only=only))
    failed = any(c.status == FAIL for c in checks)
    if not args.json:
        for c in checks:
            print(f"{c.status:5s} {c.name}" + (f": {c.detail}" if c.detail else ""))
    report = {"command": "verify", "level": args.level,
              "checks": [{"name": c.name, "status": c.status, "detail": c.detail} for c in checks],
              "ok": not failed}
    return (1 if failed else 0), report


def cmd_zeta(args):
    from .kacward import setup
    from .zeta import PATH_CAP, verify_bass

    G = _load(args.file)
    if not 1 <= args.max_len <= PATH_CAP:
        raise InputError(f"--max-len must be in 1..{PATH_CAP}")
    ks = setup(G)
    picked = ks.classes if args.spin is None else [_pick_class(ks, args.spin)]
    rows, ok = [], True
    for c in picked:
        r = verify_bass(ks.F, c.K, args.max_len)
        ok &= r.ok and r.signs_ok
        rows.append({"class": c.K.class_id, "arf": c.arf, "ok": r.ok, "n_oriented_paths": r.n_paths,
                     "signs": dict(sorted(r.signs.items())), "signs_ok": r.signs_ok,
                     "det_truncated": str(r.lhs),
                     "first_mismatch": None if r.first_mismatch is None else list(r.first_mismatch)})
        if not args.json:
            print(f"class {c.K.class_id} (arf {c.arf}): {'ok' if r.ok else 'MISMATCH'}, "
                  f"{r.n_paths} oriented prime reduced paths")
            for label, s in sorted(r.signs.items(), key=lambda t: (t[0].count("*"), t[0])):
                print(f"    {'+' if s > 0 else '-'}  {label}")
    if ks.H.n_edges != G.n_edges and not args.json:
        print("note: paths live on the even-degree graph (loops subdivided, odd vertices evened)")
    return (0 if ok else 1), {"command": "zeta", "max_len": args.max_len, "classes": rows, "ok": ok}


def cmd_bench(args):
    from .generators import torus_lattice
    from .ising import z_ising
    from .kacward import setup
    from .kasteleyn import z_dimer_numeric

    if args.torus < 1:
        raise InputError("--torus must be positive")
    try:
        w = GaussRat.parse(args.weight)
    except ValueError:
        raise InputError(f"bad weight {args.weight!r}") from None
    N = args.torus
    t0 = time.perf_counter()
    G = torus_lattice(N, w)
    ks = setup(G)
    t1 = time.perf_counter()
    z = z_dimer_numeric(ks.F, ks.classes, {})
    t2 = time.perf_counter()
    report = {"command": "bench", "N": N, "weight": str(w), "ising_vertices": G.n_vertices,
              "fisher_vertices": ks.F.gamma.n_vertices, "z": [z.real, z.imag],
              "timings": {"setup": t1 - t0, "pfaffians": t2 - t1}}
    dim = G.n_edges - G.n_vertices + 1
    if dim <= args.brute_dim:
        t3 = time.perf_counter()
        exact = z_ising(G, cap=args.brute_dim).constant_term()
        ex = complex(float(exact.re), float(exact.im))
        report["brute"] = {"z": str(exact), "rel_error": abs(z - ex) / abs(ex)}
        report["timings"]["brute"] = time.perf_counter() - t3
    if not args.json:
        print(f"torus {N}x{N}, weight {w}: {G.n_vertices} Ising vertices, {ks.F.gamma.n_vertices} Fisher vertices")
        print(f"Z = {z.real:.15g}" + (f" + {z.imag:.3g}i" if z.imag else ""))
        print(f"setup {t1 - t0:.3f} s, {len(ks.classes)} Pfaffians {t2 - t1:.3f} s")
        if "brute" in report:
            b = report["brute"]
            print(f"brute force {report['timings']['brute']:.3f} s, relative error {b['rel_error']:.2e}")
        else:
            print(f"brute force skipped (cycle space dimension {dim} > {args.brute_dim})")
    return 0, report


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kwising", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=True):
        sp.add_argument("--json", action="store_true", help="print a JSON report")
        if seed:
            sp.add_argument("--seed", type=int, default=0, help="evaluation point generator seed")

    sp = sub.add_parser("partition", help="partition function by one or all methods")
    sp.add_argument("file")
    sp.add_argument("--method", choices=METHODS + ("all",), default="all")
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--symbolic", action="store_true", help="exact polynomial (default)")
    mode.add_argument("--eval", metavar="k=v,...|random", help="evaluate at a point")
    sp.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")
    common(sp)
    sp.set_defaults(fn=cmd_partition)

    sp = sub.add_parser("spins", help="list spin structure classes")
    sp.add_argument("file")
    common(sp, seed=False)
    sp.set_defaults(fn=cmd_spins)

    sp = sub.add_parser("matrices", help="print Kac-Ward and Kasteleyn matrices of one class")
    sp.add_argument("file")
    sp.add_argument("--spin", type=int, required=True)
    common(sp, seed=False)
    sp.set_defaults(fn=cmd_matrices)

    sp = sub.add_parser("verify", help="run the invariant suite")
    sp.add_argument("file")
    sp.add_argument("--level", choices=("quick", "full"), default="quick")
    sp.add_argument("--only", help="comma-separated check names")
    common(sp)
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("zeta", help="check the truncated path product formula")
    sp.add_argument("file")
    sp.add_argument("--max-len", type=int, required=True)
    sp.add_argument("--spin", type=int)
    common(sp, seed=False)
    sp.set_defaults(fn=cmd_zeta)

    sp = sub.add_parser("bench", help="numeric Pfaffian benchmark on the N x N torus")
    sp.add_argument("--torus", type=int, required=True)
    sp.add_argument("--weight", default="3/10")
    sp.add_argument("--brute-dim", type=int, default=22, help="brute force when the cycle space is this small")
    common(sp, seed=False)
    sp.set_defaults(fn=cmd_bench)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        code, report = args.fn(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps(report, sort_keys=True, indent=2))
    return code


if __name__ == "__main__":
    sys.exit(main())
