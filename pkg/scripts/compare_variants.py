"""Print a small convergence table for a few solvers on one game.

    python scripts/compare_variants.py leduc 2000
"""

import sys

from cfr_forge.engine import RunConfig, run
from cfr_forge.games import build_game
from cfr_forge.regret import Variant

ALGOS = ["cfr+", "dcfr", "pcfr+", "apcfr+", "sapcfr+"]


def main(argv):
    name = argv[1] if len(argv) > 1 else "kuhn"
    iters = int(argv[2]) if len(argv) > 2 else 1000
    tree = build_game(name)
    checkpoints = [c for c in (10, 100, 1000, 10000) if c < iters] + [iters]
    print(f"{name}: exploitability in chips after N iterations")
    print("algo".ljust(10) + "".join(f"{c:>12}" for c in checkpoints))
    for algo in ALGOS:
        res = run(RunConfig(tree, Variant.of(algo), iterations=iters, log_schedule=checkpoints), tree=tree)
        row = "".join(f"{r.exploitability * tree.payoff_scale:12.3e}" for r in res.records)
        print(algo.ljust(10) + row)


if __name__ == "__main__":
    main(sys.argv)
