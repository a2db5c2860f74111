"""``cfr-forge`` command line: benchmark grids and game-size tables."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .diagnostics import bound_check
from .efg import GameError, tree_stats
from .engine import APD_SCHEMES, Averaging, ConvergenceRecord, LogSchedule, RunConfig, UpdateMode, run
from .games import PAPER_SIZES, GameSpec, parse_game_spec
from .regret import Algorithm, compute_alpha, parse_variant

CSV_HEADER = [
    "iteration",
    "exploitability",
    "total_pred_gap",
    "total_state_gap",
    "bound_thm1",
    "bound_thm2",
    "mean_alpha",
    "max_alpha",
    "wall_time_s",
]
DEFAULT_BASELINE = "pcfr+"


def fmt(value: float) -> str:
    """17 significant digits, so values round-trip exactly."""
    return format(float(value), ".17g")


def format_delta(pct: float | None) -> str:
    if pct is None:
        return ""
    return f"({pct:+.1f}%)"


@dataclass
class BenchPlan:
    runs: list[RunConfig]
    out: Path
    formats: frozenset[str] = frozenset({"csv", "json"})
    baseline: str = DEFAULT_BASELINE
    jobs: int = 1
    dump_infosets: bool = False
    notices: list[str] = field(default_factory=list)


def _on_off(text: str) -> bool:
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected on or off")
    return text == "on"


def _formats(text: str) -> frozenset[str]:
    items = frozenset(s.strip() for s in text.split(",") if s.strip())
    bad = items - {"csv", "json"}
    if bad:
        raise argparse.ArgumentTypeError(f"unknown format(s): {', '.join(sorted(bad))}")
    return items


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cfr-forge", description="CFR-family solvers for two-player zero-sum games.")
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="run a (game x algorithm) grid")
    bench.add_argument("--game", action="append", default=[], help="game spec, e.g. kuhn, leduc:5, battleship:3x2:3")
    bench.add_argument("--algo", action="append", default=[], help=", ".join(a.value for a in Algorithm))
    bench.add_argument("--iters", type=int, default=5000)
    bench.add_argument("--mode", choices=[m.value for m in UpdateMode], default=UpdateMode.ALTERNATING.value)
    bench.add_argument("--avg", choices=[a.value for a in Averaging], default=Averaging.QUADRATIC.value)
    bench.add_argument("--alpha-max", type=float)
    bench.add_argument("--lambda", dest="lam", type=float)
    bench.add_argument("--kappa", type=float)
    bench.add_argument("--beta", type=float)
    bench.add_argument("--log-schedule", default="log", help="log, pow2, every:N or final")
    bench.add_argument("--diagnostics", type=_on_off, default=False, metavar="on|off")
    bench.add_argument("--timing", type=_on_off, default=True, metavar="on|off",
                       help="off writes wall_time_s as 0 so output files are reproducible byte for byte")
    bench.add_argument("--dump-infosets", action="store_true",
                       help="also write per-infoset diagnostics (implies --diagnostics on)")
    bench.add_argument("--baseline", default=DEFAULT_BASELINE)
    bench.add_argument("--out", type=Path, default=Path("results"))
    bench.add_argument("--format", dest="formats", type=_formats, default=frozenset({"csv", "json"}))
    bench.add_argument("--jobs", type=int, default=1)

    stats = sub.add_parser("stats", help="print game sizes")
    stats.add_argument("--game", action="append", default=[])
    stats.add_argument("--check-paper", action="store_true",
                       help="compare against the published sizes and fail on mismatch")
    return parser


def parse_cli(argv: list[str] | None = None) -> BenchPlan:
    """Parse a ``bench`` command line into a plan (exits 2 on usage errors)."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command != "bench":
        parser.error("parse_cli only handles the bench command")
    return _plan_from_args(parser, args)


def _plan_from_args(parser: argparse.ArgumentParser, args: argparse.Namespace) -> BenchPlan:
    try:
        games = [parse_game_spec(g) for g in args.game]
        variants = [parse_variant(a, alpha_max=args.alpha_max, lam=args.lam, kappa=args.kappa, beta=args.beta)
                    for a in args.algo]
        schedule = LogSchedule(args.log_schedule)
        baseline = parse_variant(args.baseline).name
    except (GameError, ValueError) as exc:
        parser.error(str(exc))
    if args.iters < 1:
        parser.error("--iters must be >= 1")
    if args.jobs < 1:
        parser.error("--jobs must be >= 1")

    notices = []
    runs = []
    for game in games:
        for variant in variants:
            avg = Averaging(args.avg)
            if variant.algorithm is Algorithm.APDCFR_PLUS and avg not in APD_SCHEMES:
                msg = f"note: {variant.name} always uses apd averaging (ignoring --avg {avg.value})"
                if msg not in notices:
                    notices.append(msg)
                avg = Averaging.APD
            runs.append(RunConfig(
                game=game,
                variant=variant,
                iterations=args.iters,
                update_mode=UpdateMode(args.mode),
                averaging=avg,
                log_schedule=schedule,
                diagnostics=args.diagnostics or args.dump_infosets,
                timing=args.timing,
            ))
    return BenchPlan(runs, args.out, args.formats, baseline, args.jobs, args.dump_infosets, notices)


def game_name(config: RunConfig) -> str:
    return config.game.name if isinstance(config.game, GameSpec) else str(config.game)


def run_stem(config: RunConfig) -> str:
    return f"{game_name(config)}_{config.variant.name}"


def write_csv(path: Path, records: list[ConvergenceRecord]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for rec in records:
            w.writerow([rec.iteration] + [fmt(getattr(rec, k)) for k in CSV_HEADER[1:]])


def write_infoset_dump(path: Path, result) -> None:
    tree = result.tree
    solver = result.solver
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["infoset", "player", "key", "realized_regret", "bound_thm1", "bound_thm2",
                    "sum_pred_gap", "sum_state_gap", "alpha"])
        for p, (state, diag) in enumerate(zip(solver.states, solver.diags)):
            ids = np.arange(tree.num_infosets)[tree.player_infosets[p]]
            check = bound_check(diag)
            alpha = compute_alpha(state, solver.variant)
            for j, infoset in enumerate(ids):
                w.writerow([int(infoset), p, tree.infoset_keys[infoset], fmt(check.realized[j]),
                            fmt(check.bound1[j]), fmt(check.bound2[j]), fmt(state.sum_pred_gap[j]),
                            fmt(state.sum_state_gap[j]), fmt(alpha[j])])


def _execute_one(config: RunConfig, out: Path, formats: frozenset[str], dump: bool) -> tuple[float, float]:
    result = run(config)
    stem = run_stem(config)
    if "csv" in formats:
        write_csv(out / f"{stem}.csv", result.records)
    if dump:
        write_infoset_dump(out / f"{stem}_infosets.csv", result)
    return result.final_exploitability, result.tree.payoff_scale


def summarize(plan: BenchPlan, finals: list[tuple[float, float]]) -> dict:
    """``finals`` holds ``(exploitability, payoff_scale)`` per run, in plan order."""
    base = {}
    for config, (eps, _) in zip(plan.runs, finals):
        if config.variant.name == plan.baseline:
            base[game_name(config)] = eps
    rows = []
    for config, (eps, scale) in zip(plan.runs, finals):
        game = game_name(config)
        ref = base.get(game)
        delta = (eps - ref) / ref * 100.0 if ref else None
        rows.append({
            "game": game,
            "algo": config.variant.name,
            "iters": config.iterations,
            "final_exploitability": eps,
            "delta_vs_baseline_pct": delta,
            "payoff_scale": scale,
        })
    return {"runs": rows, "baseline": plan.baseline}


def execute(plan: BenchPlan, stream=sys.stdout) -> int:
    for msg in plan.notices:
        print(msg, file=sys.stderr)
    if not plan.runs:
        return 0
    plan.out.mkdir(parents=True, exist_ok=True)
    jobs = [(c, plan.out, plan.formats, plan.dump_infosets) for c in plan.runs]
    finals: list[tuple[float, float] | None] = [None] * len(jobs)
    failed = False
    if plan.jobs > 1:
        with ProcessPoolExecutor(max_workers=plan.jobs) as pool:
            futures = [pool.submit(_execute_one, *job) for job in jobs]
            for i, fut in enumerate(futures):
                try:
                    finals[i] = fut.result()
                except Exception as exc:  # noqa: BLE001 - reported, then exit 1
                    print(f"run {run_stem(jobs[i][0])} failed: {exc}", file=sys.stderr)
                    failed = True
    else:
        for i, job in enumerate(jobs):
            try:
                finals[i] = _execute_one(*job)
            except Exception as exc:  # noqa: BLE001
                print(f"run {run_stem(job[0])} failed: {exc}", file=sys.stderr)
                failed = True
    if failed:
        return 1

    summary = summarize(plan, finals)
    if "json" in plan.formats:
        with open(plan.out / "summary.json", "w") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
    for row in summary["runs"]:
        print(f"{row['game']:<20} {row['algo']:<10} {row['final_exploitability']:.3e} "
              f"{format_delta(row['delta_vs_baseline_pct'])}", file=stream)
    return 0


def stats_command(specs: list[str], check_paper: bool = False, stream=sys.stdout) -> int:
    cols = ("histories", "infosets", "terminal_histories", "depth", "max_infoset_size")
    print("game\t" + "\t".join(cols), file=stream)
    status = 0
    for text in specs:
        spec = parse_game_spec(text)
        stats = tree_stats(spec.build())
        line = f"{spec.name}\t" + "\t".join(str(v) for v in stats.as_tuple())
        if check_paper:
            expected = PAPER_SIZES.get(spec.name)
            if expected is None:
                line += "\tno reference"
            elif expected != stats:
                line += "\tMISMATCH expected " + " ".join(map(str, expected.as_tuple()))
                status = 1
            else:
                line += "\tok"
        print(line, file=stream, flush=True)
    return status


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "stats":
        try:
            return stats_command(args.game or list(PAPER_SIZES), args.check_paper)
        except GameError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    plan = _plan_from_args(parser, args)
    return execute(plan)


if __name__ == "__main__":
    sys.exit(main())
