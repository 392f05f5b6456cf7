"""Run the invariant suite over the seeded random corpus and print one line per map.

    python scripts/corpus_check.py [--level quick|full] [--seed 2024]
"""

import argparse
import time
from collections import Counter

from kwising.generators import CorpusConfig, random_corpus
from kwising.verify import FAIL, VerifyConfig, run_checks


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--level", default="full", choices=("quick", "full"))
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()

    corpus = random_corpus(CorpusConfig(seed=args.seed))
    tally = Counter()
    t_all = time.perf_counter()
    for k, G in enumerate(corpus):
        t = time.perf_counter()
        checks = run_checks(G, VerifyConfig(level=args.level))
        tally.update(c.status for c in checks)
        bad = [c.name for c in checks if c.status == FAIL]
        print(f"{k:3d}  g={G.genus} V={G.n_vertices} E={G.n_edges}  {time.perf_counter() - t:6.2f}s  "
              + ("ok" if not bad else "FAIL " + ",".join(bad)), flush=True)
    print(f"{len(corpus)} maps in {time.perf_counter() - t_all:.1f}s: " + ", ".join(f"{v} {k}" for k, v in sorted(tally.items())))
    return 1 if tally[FAIL] else 0


if __name__ == "__main__":
    raise SystemExit(main())
