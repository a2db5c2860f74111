"""Write the regret-bound totals and mean alpha per iteration as CSV on stdout.

Useful for plotting how the two bound expressions and the learned alpha evolve:

    python scripts/bound_dynamics.py leduc apcfr+ 1000 > bounds.csv
"""

import csv
import sys

import numpy as np

from cfr_forge.engine import Solver
from cfr_forge.games import build_game
from cfr_forge.regret import Variant


def main(argv):
    name, algo = (argv[1], argv[2]) if len(argv) > 2 else ("kuhn", "apcfr+")
    iters = int(argv[3]) if len(argv) > 3 else 500
    solver = Solver(build_game(name), Variant.of(algo), diagnostics=True)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["iteration", "pred_gap", "state_gap", "bound1", "bound2", "mean_alpha"])
    for t in range(1, iters + 1):
        solver.iterate()
        s = solver.summary()
        out.writerow([t, f"{s.total_pred_gap:.6g}", f"{s.total_state_gap:.6g}",
                      f"{s.total_bound1:.6g}", f"{s.total_bound2:.6g}",
                      f"{np.mean(np.concatenate(solver.alphas())):.6g}"])


if __name__ == "__main__":
    main(sys.argv)
