"""Command line entry point.

    trajwsn simulate --config scenario.ini --out results/ [--seed-count 20] [--algorithm both] [--plot]
    trajwsn optimal-m --n 100 --side 100 --d1 90
    trajwsn cluster --input trajectories.csv --threshold 12.5

Exit status: 0 success, 1 configuration or usage error, 2 runtime error.
"""
from __future__ import annotations

import argparse
import logging
import sys

from . import _accel
from .clustering import cluster_trajectories
from .config import ConfigError, SimConfig, load_config, option_keys, parse_overrides
from .energy import EnergyModelError, FieldParams, RadioParams, optimal_cluster_count
from .report import emit_plots, run_scenario, write_csv
from .trajectory import TrajectoryError, read_trajectories_csv

log = logging.getLogger("trajwsn")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="trajwsn", description="Trajectory-clustering cluster-head election for sensor networks")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="run a scenario and write rounds.csv / summary.csv")
    sim.add_argument("--config", help="scenario file (defaults apply when omitted)")
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--seed-count", type=int, help="run seeds first..first+k-1")
    sim.add_argument("--algorithm", choices=["trajectory", "leach", "both"])
    sim.add_argument("--plot", action="store_true", help="also write alive.svg and packets.svg")
    sim.add_argument("--per-seed", action="store_true", help="draw per-seed curves under the averages")
    overrides = sim.add_argument_group("config overrides", "every config key is also a flag")
    for key, f in option_keys().items():
        overrides.add_argument(f"--{key}", dest=f"set:{key}", metavar="VALUE", help=f.metadata.get("help") or None)

    om = sub.add_parser("optimal-m", help="analytic optimum cluster count")
    om.add_argument("--n", type=int, default=100)
    om.add_argument("--side", type=float, default=100.0)
    om.add_argument("--d1", type=float, default=90.0)
    for name in ("e_tx", "e_da", "eps1", "eps2"):
        om.add_argument(f"--{name}", type=float)

    cl = sub.add_parser("cluster", help="cluster trajectories from a tid,seq,x,y CSV")
    cl.add_argument("--input", required=True)
    g = cl.add_mutually_exclusive_group()
    g.add_argument("--threshold", type=float, help="leader threshold in metres (default: half the max dissimilarity)")
    g.add_argument("--target-clusters", type=int, help="pick the threshold by sweep for at least this many clusters")
    return p


def _simulate(args) -> int:
    cfg = load_config(args.config) if args.config else SimConfig()
    pairs = {k.split(":", 1)[1]: v for k, v in vars(args).items() if k.startswith("set:") and v is not None}
    if args.seed_count is not None:
        pairs["run.seed_count"] = str(args.seed_count)
    if args.algorithm is not None:
        pairs["election.algorithm"] = args.algorithm
    cfg = parse_overrides(pairs, cfg)
    log.info("running %d seed(s) x %s (numba=%s)", len(cfg.seed_list), ",".join(cfg.algorithms), _accel.USE_NUMBA)
    results = run_scenario(cfg)
    failed = [r for r in results if r.error]
    ok = [r for r in results if not r.error]
    if ok:
        rounds, summary = write_csv(results, args.out)
        print(f"wrote {rounds} and {summary}")
        if args.plot:
            for path in emit_plots(ok, args.out, per_seed=args.per_seed):
                print(f"wrote {path}")
        for r in ok:
            s = r.summary
            print(f"{r.algorithm:>10} seed={r.seed:<5} first_death={s.first_death_round} "
                  f"last_death={s.last_death_round} packets={s.total_packets}")
    for r in failed:
        print(f"run {r.algorithm} seed={r.seed} failed: {r.error.splitlines()[0]}", file=sys.stderr)
    return EXIT_RUNTIME if failed else EXIT_OK


def _optimal_m(args) -> int:
    radio = {k: getattr(args, k) for k in ("e_tx", "e_da", "eps1", "eps2") if getattr(args, k) is not None}
    try:
        fld = FieldParams(args.n, args.side, args.d1)
        real, rounded = optimal_cluster_count(fld, RadioParams(**radio))
    except EnergyModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"M = {real!r}")
    print(f"rounded = {rounded}")
    return EXIT_OK


def _cluster(args) -> int:
    try:
        ts = read_trajectories_csv(args.input)
    except (OSError, TrajectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    assignment, reps = cluster_trajectories(ts, threshold=args.threshold, target_clusters=args.target_clusters)
    rep_set = set(reps.reps)
    print("tid,cluster,representative,is_representative")
    for t, label in zip(ts, assignment.labels):
        rep = reps.reps[label]
        print(f"{t.tid},{label},{rep},{int(t.tid in rep_set)}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "simulate":
            return _simulate(args)
        if args.command == "optimal-m":
            return _optimal_m(args)
        return _cluster(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        log.debug("runtime failure", exc_info=True)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
