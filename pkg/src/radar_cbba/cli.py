"""Command line entry points: ``simulate`` and ``gen-scenario``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from .oracle import CapacityError
from .sim.runner import run
from .sim.scenario import TOPOLOGIES, Scenario, ScenarioError, generate_scenario

log = logging.getLogger("radar_cbba")


def _simulate(args) -> int:
    scenario = Scenario.load(args.scenario)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.steps is not None:
        changes["steps"] = args.steps
    if changes:
        scenario = dataclasses.replace(scenario, **changes)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    compare_at = range(0, scenario.steps, args.compare_every) if args.compare_every else ()
    result = run(
        scenario,
        trace=args.trace,
        compare_at=compare_at,
        snapshot_every=args.snapshot_every,
        out_dir=out,
    )
    result.write_metrics(out / "metrics.csv")
    if args.compare_every:
        result.write_comparison(out / "comparison.csv")
    if args.trace:
        result.write_trace(out / "trace.jsonl")
    last = result.metrics[-1] if result.metrics else None
    if last is not None:
        print(
            f"{scenario.steps} steps: utility={last.total_utility:.3f} "
            f"coverage_main={last.coverage_main:.2f} coverage_optional={last.coverage_optional:.2f} "
            f"mean_load={last.mean_load:.2f} conflicts={last.conflicts}"
        )
    return 0


def _gen_scenario(args) -> int:
    scenario = generate_scenario(
        args.radars,
        args.targets,
        arena=args.arena,
        seed=args.seed,
        topology=args.topology,
        steps=args.steps,
        static=args.static,
    )
    scenario.save(args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="radar-cbba", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a scenario file and write metrics")
    sim.add_argument("--scenario", required=True, help="scenario JSON file")
    sim.add_argument("--seed", type=int)
    sim.add_argument("--steps", type=int)
    sim.add_argument("--out", default="out")
    sim.add_argument("--compare-every", type=int, default=10,
                     help="solve the centralized problems every N steps (0: never)")
    sim.add_argument("--snapshot-every", type=int, default=0, help="write an SVG every N steps")
    sim.add_argument("--trace", action="store_true", help="write every message to trace.jsonl")
    sim.set_defaults(func=_simulate)

    gen = sub.add_parser("gen-scenario", help="write a random scenario file")
    gen.add_argument("--radars", type=int, required=True)
    gen.add_argument("--targets", type=int, required=True)
    gen.add_argument("--topology", default="COMPLETE", type=str.upper, choices=TOPOLOGIES)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--steps", type=int, default=100)
    gen.add_argument("--arena", type=float, default=20_000.0)
    gen.add_argument("--static", action="store_true", help="motionless targets, frozen utilities")
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=_gen_scenario)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ScenarioError, CapacityError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
