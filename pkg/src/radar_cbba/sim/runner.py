"""Synchronous simulation loop, per-step metrics and the centralized comparison."""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

from ..allocation import DominanceMonitor, utility_pair
from ..cbba import RadarAgent
from ..oracle import Assignment, ProblemInstance, evaluate, solve_p1, solve_p2
from .render import render_snapshot
from .scenario import Scenario, World

log = logging.getLogger(__name__)

METRICS_HEADER = ["t", "total_utility", "coverage_main", "coverage_optional", "mean_load", "conflicts"]
COMPARISON_HEADER = [
    "t", "dec_utility", "central_p1", "central_p2", "ratio_p1", "ratio_p2",
    "cov_dec", "cov_central", "load_dec", "load_central",
]


@dataclass
class StepMetrics:
    t: int
    total_utility: float
    coverage_main: float
    coverage_optional: float
    mean_load: float
    per_radar_load: dict
    conflicts: int
    main_utility: float = 0.0

    def row(self) -> list:
        return [self.t, self.total_utility, self.coverage_main, self.coverage_optional,
                self.mean_load, self.conflicts]


@dataclass
class ComparisonRow:
    """Decentralized claims against both centralized optima at one frozen step.

    ``ratio_p1`` compares the main-round utility with the single-radar
    optimum; ``ratio_p2`` compares the full two-round utility with the
    coupled optimum. Centralized coverage and load come from the coupled
    optimum.
    """

    t: int
    dec_utility: float
    central_p1: float
    central_p2: float
    ratio_p1: float
    ratio_p2: float
    cov_dec: float
    cov_central: float
    load_dec: float
    load_central: float
    dec_main_utility: float = 0.0
    cov_opt_dec: float = 0.0
    cov_opt_central: float = 0.0
    cov_central_p1: float = 0.0
    load_central_p1: float = 0.0

    def row(self) -> list:
        return [getattr(self, name) for name in COMPARISON_HEADER]


@dataclass
class StepRecord:
    """Per-radar beliefs after one step, kept for inspection and tests."""

    t: int
    main_z: dict
    main_y: dict
    optional_z: dict
    optional_y: dict
    main_bundles: dict
    optional_bundles: dict
    known: dict


@dataclass
class RunResult:
    scenario: Scenario
    metrics: list = field(default_factory=list)
    assignment: Assignment = field(default_factory=Assignment)
    instance: ProblemInstance | None = None
    trace: list = field(default_factory=list)
    history: list = field(default_factory=list)
    comparisons: list = field(default_factory=list)
    dominance_violations: int = 0

    def write_metrics(self, path):
        _write_csv(path, METRICS_HEADER, [m.row() for m in self.metrics])

    def write_comparison(self, path):
        _write_csv(path, COMPARISON_HEADER, [c.row() for c in self.comparisons])

    def write_trace(self, path):
        with open(path, "w") as fh:
            for msg in self.trace:
                fh.write(json.dumps(msg.to_dict()))
                fh.write("\n")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in r])


def make_agents(scenario: Scenario) -> list[RadarAgent]:
    return [
        RadarAgent(
            r.id, r.params,
            utility=scenario.utility,
            gamma=scenario.gamma,
            scale=scenario.scale,
            dt=scenario.dt,
            t_stale=scenario.stale_after,
            seed=scenario.seed,
        )
        for r in sorted(scenario.radars, key=lambda r: r.id)
    ]


def claims(agents) -> tuple[dict, dict]:
    """Targets -> sorted list of radars claiming them, for each round."""
    main, opt = {}, {}
    for a in agents:
        for j in a.main.bundle:
            main.setdefault(j, []).append(a.id)
        for j in a.optional.bundle:
            opt.setdefault(j, []).append(a.id)
    return main, opt


def claimed_assignment(agents) -> Assignment:
    """Unambiguous claims only: conflicted targets count as unassigned."""
    main_claims, opt_claims = claims(agents)
    main = {j: rs[0] for j, rs in main_claims.items() if len(rs) == 1}
    optional = {}
    for j, rs in opt_claims.items():
        if len(rs) == 1 and j in main and rs[0] != main[j]:
            optional[j] = rs[0]
    return Assignment(main, optional)


def build_instance(agents, scenario: Scenario, pairs="all") -> ProblemInstance:
    """Problem instance from each radar's current views.

    ``pairs`` is ``"all"`` or an iterable of ``(main, optional, target)``
    triples to evaluate; pair utilities are the costly part.
    """
    radars = [a.id for a in agents]
    by_id = {a.id: a for a in agents}
    targets = sorted(t.id for t in scenario.targets)
    um, costs = {}, {}
    for a in agents:
        for j, view in a.views.items():
            um[(a.id, j)] = view.utility
            costs[(a.id, j)] = scenario.gamma
    up = {}
    if pairs == "all":
        wanted = [
            (i, k, j) for j in targets for i in radars for k in radars
            if i != k and (i, j) in um and (k, j) in um
        ]
    else:
        wanted = [(i, k, j) for i, k, j in pairs if (i, j) in um and (k, j) in um]
    for i, k, j in wanted:
        up[(i, k, j)] = utility_pair(by_id[i].views[j].ellipse, by_id[k].views[j].ellipse, scenario.utility)
    return ProblemInstance(
        radars=radars,
        budgets={a.id: a.params.budget for a in agents},
        targets=targets,
        utilities_main=um,
        utilities_pair=up,
        costs=costs,
    )


def coverage(assignment: Assignment, n_targets: int) -> tuple[float, float]:
    if n_targets == 0:
        return 0.0, 0.0
    n_main = sum(1 for i in assignment.main.values() if i is not None)
    n_opt = sum(1 for k in assignment.optional.values() if k is not None)
    return n_main / n_targets, n_opt / n_targets


def mean_load(assignment: Assignment, instance: ProblemInstance) -> float:
    loads = assignment.loads(instance)
    if not instance.radars:
        return 0.0
    return math.fsum(loads[r] / instance.budgets[r] for r in instance.radars) / len(instance.radars)


def step_metrics(t: int, agents, scenario: Scenario) -> tuple[StepMetrics, Assignment, ProblemInstance]:
    n_targets = len(scenario.targets)
    main_claims, opt_claims = claims(agents)
    assignment = claimed_assignment(agents)
    pairs = [(assignment.main[j], k, j) for j, k in assignment.optional.items()]
    instance = build_instance(agents, scenario, pairs=pairs)
    total, feasible, violations = evaluate(instance, assignment)
    if not feasible:
        raise RuntimeError(f"step {t}: decentralized claims violate constraints: {violations}")
    main_only = Assignment(assignment.main, {})
    main_total = evaluate(instance, main_only)[0]
    per_radar = {a.id: a.load / a.params.budget for a in agents}
    assignment.total_utility = total
    m = StepMetrics(
        t=t,
        total_utility=total,
        coverage_main=sum(1 for rs in main_claims.values() if len(rs) == 1) / n_targets if n_targets else 0.0,
        coverage_optional=sum(1 for rs in opt_claims.values() if len(rs) == 1) / n_targets if n_targets else 0.0,
        mean_load=math.fsum(per_radar.values()) / len(per_radar) if per_radar else 0.0,
        per_radar_load=per_radar,
        conflicts=sum(1 for rs in main_claims.values() if len(rs) > 1),
        main_utility=main_total,
    )
    return m, assignment, instance


def compare_step(t: int, agents, scenario: Scenario, dec: StepMetrics, dec_assignment: Assignment,
                 solver_limits: dict | None = None) -> ComparisonRow:
    """Solve both centralized problems on the frozen world at step ``t``."""
    limits = solver_limits or {}
    instance = build_instance(agents, scenario)
    try:
        p1 = solve_p1(instance, **limits.get("p1", {}))
        p2 = solve_p2(instance, **limits.get("p2", {}))
    except Exception as exc:
        raise type(exc)(f"step {t}: {exc}") from exc
    n = len(scenario.targets)
    dec_total, _, _ = evaluate(instance, dec_assignment)
    dec_main = evaluate(instance, Assignment(dec_assignment.main, {}))[0]
    cov_dec, cov_opt_dec = coverage(dec_assignment, n)
    cov_c, cov_opt_c = coverage(p2, n)
    cov_c1, _ = coverage(p1, n)

    def ratio(a, b):
        return a / b if b > 0 else 1.0

    return ComparisonRow(
        t=t,
        dec_utility=dec_total,
        central_p1=p1.total_utility,
        central_p2=p2.total_utility,
        ratio_p1=ratio(dec_main, p1.total_utility),
        ratio_p2=ratio(dec_total, p2.total_utility),
        cov_dec=cov_dec,
        cov_central=cov_c,
        load_dec=mean_load(dec_assignment, instance),
        load_central=mean_load(p2, instance),
        dec_main_utility=dec_main,
        cov_opt_dec=cov_opt_dec,
        cov_opt_central=cov_opt_c,
        cov_central_p1=cov_c1,
        load_central_p1=mean_load(p1, instance),
    )


def _record(t: int, agents) -> StepRecord:
    return StepRecord(
        t=t,
        main_z={a.id: dict(a.main.z) for a in agents},
        main_y={a.id: dict(a.main.y) for a in agents},
        optional_z={a.id: dict(a.optional.z) for a in agents},
        optional_y={a.id: dict(a.optional.y) for a in agents},
        main_bundles={a.id: list(a.main.bundle) for a in agents},
        optional_bundles={a.id: list(a.optional.bundle) for a in agents},
        known={
            a.id: set(a.main.z) | set(a.main.e) | set(a.optional.z) | set(a.tracks) | set(a.last_seen)
            for a in agents
        },
    )


def _check_dominance(monitor: DominanceMonitor, instance: ProblemInstance):
    for (i, k, j), c in instance.utilities_pair.items():
        main = instance.utilities_main[(i, j)]
        monitor.check(main, c - main)


def run(
    scenario: Scenario,
    *,
    trace: bool = False,
    history: bool = False,
    compare_at=(),
    snapshot_every: int | None = None,
    out_dir=None,
    solver_limits: dict | None = None,
) -> RunResult:
    """Simulate ``scenario`` and collect metrics.

    Each step: targets move, every radar runs its step on the messages sent
    to it during the previous step, then all messages are delivered along
    the communication edges.
    """
    world = World(scenario.targets, scenario.dt)
    agents = make_agents(scenario)
    neighbors = scenario.neighbors()
    result = RunResult(scenario)
    monitor = DominanceMonitor()
    compare_at = set(compare_at)

    for w in range(scenario.warmup_steps):
        if w:
            world.advance()
        obs = world.observations()
        for a in agents:
            a.warm_up(obs, w - scenario.warmup_steps)
    if scenario.freeze_utilities:
        obs = world.observations()
        for a in agents:
            a.freeze(obs, 0)

    inbox = {a.id: [] for a in agents}
    for t in range(scenario.steps):
        if t or scenario.warmup_steps:
            world.advance()
        obs = world.observations()
        outboxes = {}
        for a in agents:
            outboxes[a.id], _ = a.step(inbox[a.id], obs, t)
        inbox = {a.id: [m for n in neighbors[a.id] for m in outboxes[n]] for a in agents}
        for a in agents:
            if a.load > a.params.budget + 1e-9:
                raise RuntimeError(f"step {t}: radar {a.id} exceeds its budget")
            overlap = set(a.main.bundle) & set(a.optional.bundle)
            if overlap:
                raise RuntimeError(f"step {t}: radar {a.id} is main and optional for {sorted(overlap)}")
        if trace:
            for a in agents:
                result.trace.extend(outboxes[a.id])
        m, assignment, instance = step_metrics(t, agents, scenario)
        _check_dominance(monitor, instance)
        result.metrics.append(m)
        result.assignment = assignment
        result.instance = instance
        if history:
            result.history.append(_record(t, agents))
        if t in compare_at:
            result.comparisons.append(compare_step(t, agents, scenario, m, assignment, solver_limits))
        if snapshot_every and out_dir is not None and t % snapshot_every == 0:
            render_snapshot(
                Path(out_dir) / f"snapshot_{t}.svg",
                radars={r.id: r.params for r in scenario.radars},
                targets={j: p for j, (p, _) in obs.items()},
                main_claims={a.id: list(a.main.bundle) for a in agents},
                optional_claims={a.id: list(a.optional.bundle) for a in agents},
                ellipses=[v.ellipse for a in agents for _, v in sorted(a.views.items())],
                extent=scenario.arena,
            )
    result.dominance_violations = monitor.violations
    return result


def compare_centralized(scenario: Scenario, at_step, solver_limits: dict | None = None) -> list[ComparisonRow]:
    """Comparison rows at the given steps (run the scenario, freeze, solve both problems)."""
    return run(scenario, compare_at=at_step, solver_limits=solver_limits).comparisons
