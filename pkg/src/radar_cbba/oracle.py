"""Centralized exact allocation: the optimality baseline for the auction.

Both problems are solved by depth-first branch and bound over per-target
choices. For the single-radar problem a target is either untracked or given
to one main radar; for the coupled problem it may additionally get an
optional radar ``k != i`` next to its main radar ``i``.

Ties between optimal assignments are broken towards the lexicographically
smallest choice vector, where each target's choices are ordered as
``[none, main radars in radar order, (main, optional) pairs in radar order]``.
Totals are summed with :func:`math.fsum`, so equal assignments always
produce bit-identical utilities.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Hashable

RadarId = Hashable
TargetId = Hashable


class CapacityError(RuntimeError):
    """Instance too large for the exact solver."""


@dataclass
class ProblemInstance:
    radars: list
    budgets: dict
    targets: list
    utilities_main: dict
    utilities_pair: dict = field(default_factory=dict)
    costs: dict = field(default_factory=dict)

    def __post_init__(self):
        radar_set = set(self.radars)
        target_set = set(self.targets)
        if len(radar_set) != len(self.radars) or len(target_set) != len(self.targets):
            raise ValueError("radar and target ids must be unique")
        for r in self.radars:
            if r not in self.budgets:
                raise ValueError(f"missing budget for radar {r!r}")
        for (i, j), c in self.utilities_main.items():
            if i not in radar_set or j not in target_set:
                raise ValueError(f"unknown ids in utilities_main: {(i, j)!r}")
            if c < 0:
                raise ValueError("utilities must be non-negative")
            if (i, j) not in self.costs:
                raise ValueError(f"missing cost for {(i, j)!r}")
        for (i, k, j), c in self.utilities_pair.items():
            if c < 0:
                raise ValueError("utilities must be non-negative")
            if (i, j) not in self.utilities_main or (k, j) not in self.costs:
                raise ValueError(f"pair {(i, k, j)!r} needs main utility and costs")
            if i == k and c != self.utilities_main[(i, j)]:
                raise ValueError("a self-pair must carry the main-only utility")
        for c in self.costs.values():
            if not c > 0:
                raise ValueError("costs must be positive")

    def to_dict(self) -> dict:
        return {
            "radars": list(self.radars),
            "budgets": {str(r): self.budgets[r] for r in self.radars},
            "targets": list(self.targets),
            "utilities_main": [[i, j, c] for (i, j), c in sorted(self.utilities_main.items())],
            "utilities_pair": [[i, k, j, c] for (i, k, j), c in sorted(self.utilities_pair.items())],
            "costs": [[i, j, c] for (i, j), c in sorted(self.costs.items())],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "ProblemInstance":
        radars = list(d["radars"])
        by_name = {str(r): r for r in radars}
        return cls(
            radars=radars,
            budgets={by_name[k]: v for k, v in d["budgets"].items()},
            targets=list(d["targets"]),
            utilities_main={(i, j): c for i, j, c in d["utilities_main"]},
            utilities_pair={(i, k, j): c for i, k, j, c in d.get("utilities_pair", [])},
            costs={(i, j): c for i, j, c in d["costs"]},
        )


@dataclass
class Assignment:
    main: dict = field(default_factory=dict)
    optional: dict = field(default_factory=dict)
    total_utility: float = 0.0

    def loads(self, instance: ProblemInstance) -> dict:
        used = {r: 0.0 for r in instance.radars}
        for j, i in self.main.items():
            if i is not None:
                used[i] = used.get(i, 0.0) + instance.costs.get((i, j), 0.0)
        for j, k in self.optional.items():
            if k is not None:
                used[k] = used.get(k, 0.0) + instance.costs.get((k, j), 0.0)
        return used


# option: (value, radar_charges, main, optional)
def _options(instance: ProblemInstance, j, coupled: bool) -> list[tuple]:
    opts = [(0.0, (), None, None)]
    for i in instance.radars:
        if (i, j) in instance.utilities_main:
            opts.append((instance.utilities_main[(i, j)], ((i, instance.costs[(i, j)]),), i, None))
    if coupled:
        for i in instance.radars:
            for k in instance.radars:
                if i != k and (i, k, j) in instance.utilities_pair:
                    charges = ((i, instance.costs[(i, j)]), (k, instance.costs[(k, j)]))
                    opts.append((instance.utilities_pair[(i, k, j)], charges, i, k))
    return opts


def _hull_increments(opts: list[tuple]) -> list[tuple[float, float]]:
    """Slope-ordered (cost, value) increments of the upper concave hull through (0, 0)."""
    pts = {}
    for value, charges, _, _ in opts:
        cost = sum(c for _, c in charges)
        if value > pts.get(cost, -1.0):
            pts[cost] = value
    pts.setdefault(0.0, 0.0)
    ordered = sorted(pts.items())
    hull: list[tuple[float, float]] = []
    for c, v in ordered:
        if hull and v <= hull[-1][1]:
            continue
        while len(hull) >= 2:
            (c1, v1), (c2, v2) = hull[-2], hull[-1]
            if (v2 - v1) * (c - c1) <= (v - v1) * (c2 - c1):
                hull.pop()
            else:
                break
        hull.append((c, v))
    return [(c2 - c1, v2 - v1) for (c1, v1), (c2, v2) in zip(hull, hull[1:])]


def _solve(instance: ProblemInstance, coupled: bool) -> Assignment:
    targets = list(instance.targets)
    n = len(targets)
    opts = [_options(instance, j, coupled) for j in targets]
    best_single = [max(o[0] for o in ot) for ot in opts]
    # branch on high-value targets first; ties keep instance order
    order = sorted(range(n), key=lambda t: -best_single[t])

    # pooled-budget multiple-choice knapsack relaxation, per suffix of `order`
    incs = [_hull_increments(opts[t]) for t in order]
    suffix_incs = []
    for d in range(n + 1):
        merged = [inc for t in range(d, n) for inc in incs[t]]
        merged.sort(key=lambda cv: -cv[1] / cv[0] if cv[0] > 0 else -math.inf)
        suffix_incs.append(merged)

    residual = dict(instance.budgets)
    choice = [0] * n
    scale = max([1.0] + best_single)
    tol = 1e-9 * scale * max(1, n)
    best_value = -math.inf
    best_key: tuple | None = None

    def pooled_bound(d: int) -> float:
        budget = sum(max(0.0, v) for v in residual.values())
        acc = 0.0
        for cost, gain in suffix_incs[d]:
            if cost <= budget:
                acc += gain
                budget -= cost
            else:
                acc += gain * budget / cost
                break
        return acc

    def fits(charges) -> bool:
        need: dict = {}
        for r, c in charges:
            need[r] = need.get(r, 0.0) + c
        return all(residual[r] - c >= -1e-12 for r, c in need.items())

    def feasible_bound(d: int) -> float:
        acc = 0.0
        for t in order[d:]:
            acc += max(o[0] for o in opts[t] if fits(o[1]))
        return acc

    def dfs(d: int, value: float):
        nonlocal best_value, best_key
        if d == n:
            total = math.fsum(opts[t][choice[t]][0] for t in range(n))
            key = tuple(choice)
            if total > best_value or (total == best_value and key < best_key):
                best_value, best_key = total, key
            return
        if best_key is not None:
            ub = value + min(pooled_bound(d), feasible_bound(d))
            if ub < best_value - tol:
                return
        t = order[d]
        ranked = sorted(range(len(opts[t])), key=lambda o: (-opts[t][o][0], o))
        for o in ranked:
            v, charges, _, _ = opts[t][o]
            if not fits(charges):
                continue
            for r, c in charges:
                residual[r] -= c
            choice[t] = o
            dfs(d + 1, value + v)
            for r, c in charges:
                residual[r] += c
        choice[t] = 0

    dfs(0, 0.0)
    assert best_key is not None
    main, optional = {}, {}
    for t, j in enumerate(targets):
        _, _, i, k = opts[t][best_key[t]]
        main[j] = i
        optional[j] = k
    return Assignment(main, optional, best_value)


def _check_capacity(instance: ProblemInstance, max_radars: int, max_targets: int):
    if len(instance.radars) > max_radars or len(instance.targets) > max_targets:
        raise CapacityError(
            f"instance with {len(instance.radars)} radars and {len(instance.targets)} targets "
            f"exceeds solver capacity ({max_radars} radars, {max_targets} targets)"
        )


def solve_p1(instance: ProblemInstance, max_radars: int = 6, max_targets: int = 14) -> Assignment:
    """Optimal main-only allocation (each target to at most one radar)."""
    _check_capacity(instance, max_radars, max_targets)
    return _solve(instance, coupled=False)


def solve_p2(instance: ProblemInstance, max_radars: int = 4, max_targets: int = 12) -> Assignment:
    """Optimal allocation with up to one optional radar per tracked target."""
    _check_capacity(instance, max_radars, max_targets)
    return _solve(instance, coupled=True)


def target_value(instance: ProblemInstance, j, main, optional) -> float:
    if main is None:
        return 0.0
    if optional is None:
        return instance.utilities_main[(main, j)]
    return instance.utilities_pair[(main, optional, j)]


def evaluate(instance: ProblemInstance, assignment: Assignment) -> tuple[float, bool, list[str]]:
    """Recompute the objective of ``assignment`` and list constraint violations."""
    violations = []
    radar_set = set(instance.radars)
    target_set = set(instance.targets)
    values = []
    for j in sorted(set(assignment.main) | set(assignment.optional), key=str):
        i = assignment.main.get(j)
        k = assignment.optional.get(j)
        if j not in target_set:
            violations.append(f"unknown target {j!r}")
            continue
        if i is not None and i not in radar_set or k is not None and k not in radar_set:
            violations.append(f"unknown radar for target {j!r}")
            continue
        if k is not None and i is None:
            violations.append(f"(C2) target {j!r} has optional radar {k!r} but no main radar")
            continue
        if k is not None and k == i:
            violations.append(f"(C2) radar {i!r} is both main and optional for target {j!r}")
            continue
        if i is not None and (i, j) not in instance.utilities_main:
            violations.append(f"(C1) radar {i!r} cannot track target {j!r}")
            continue
        if k is not None and (i, k, j) not in instance.utilities_pair:
            violations.append(f"(C2) pair ({i!r}, {k!r}) cannot track target {j!r}")
            continue
        values.append(target_value(instance, j, i, k))
    for r, used in assignment.loads(instance).items():
        if r in instance.budgets and used > instance.budgets[r] + 1e-9:
            violations.append(f"(L) radar {r!r} load {used:g} exceeds budget {instance.budgets[r]:g}")
    return math.fsum(values), not violations, violations
