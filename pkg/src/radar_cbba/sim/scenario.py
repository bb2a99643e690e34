"""Scenario description, random generation, JSON files and target motion."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import networkx as nx
import numpy as np

from ..allocation import UtilityParams
from ..geometry import PolarNoise
from ..tracking import NOMINAL_SNR, RadarParams

TOPOLOGIES = ("COMPLETE", "LINE", "RING", "RANDOM_CONNECTED")
CONSTANT_VELOCITY = "CONSTANT_VELOCITY"
WAYPOINTS = "WAYPOINTS"


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class RadarSpec:
    id: int
    params: RadarParams


@dataclass(frozen=True)
class TargetSpec:
    id: int
    position: tuple[float, float]
    velocity: tuple[float, float] = (0.0, 0.0)
    motion: str = CONSTANT_VELOCITY
    waypoints: tuple = ()

    @property
    def speed(self) -> float:
        return math.hypot(*self.velocity)


@dataclass(frozen=True)
class Scenario:
    """Everything needed to reproduce a run.

    ``warmup_steps`` surveillance-only steps precede the first auction so
    every radar starts with coarse tracks of the targets in its range; targets
    move during the warm-up too. With ``freeze_utilities`` the bidding
    utilities are fixed at the end of the warm-up (static benchmarks).
    """

    seed: int
    steps: int
    dt: float
    radars: tuple[RadarSpec, ...]
    comm_edges: tuple[tuple[int, int], ...]
    targets: tuple[TargetSpec, ...]
    utility: UtilityParams = field(default_factory=UtilityParams)
    gamma: float = 1.0
    t_stale: int | None = None
    scale: float = 2.0
    warmup_steps: int = 5
    freeze_utilities: bool = False
    arena: float = 20_000.0

    def __post_init__(self):
        if not self.dt > 0:
            raise ScenarioError("dt must be positive")
        if self.steps < 0 or self.warmup_steps < 0:
            raise ScenarioError("step counts must be non-negative")
        ids = [r.id for r in self.radars]
        if len(set(ids)) != len(ids):
            raise ScenarioError("radar ids must be unique")
        tids = [t.id for t in self.targets]
        if len(set(tids)) != len(tids):
            raise ScenarioError("target ids must be unique")
        for a, b in self.comm_edges:
            if a not in ids or b not in ids or a == b:
                raise ScenarioError(f"invalid communication edge {(a, b)}")
        if ids and not nx.is_connected(self.graph()):
            raise ScenarioError("communication graph must be connected")
        if not self.gamma > 0:
            raise ScenarioError("gamma must be positive")
        if self.t_stale is not None and self.t_stale < 1:
            raise ScenarioError("t_stale must be at least 1")

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(r.id for r in self.radars)
        g.add_edges_from(self.comm_edges)
        return g

    @property
    def diameter(self) -> int:
        return nx.diameter(self.graph()) if len(self.radars) > 1 else 0

    @property
    def stale_after(self) -> int:
        return self.t_stale if self.t_stale is not None else 2 * self.diameter + 4

    def neighbors(self) -> dict[int, list[int]]:
        g = self.graph()
        return {r.id: sorted(g.neighbors(r.id)) for r in self.radars}

    # -- serialization --------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "steps": self.steps,
            "dt": self.dt,
            "radars": [_radar_to_dict(r) for r in self.radars],
            "comm_edges": [list(e) for e in self.comm_edges],
            "targets": [_target_to_dict(t) for t in self.targets],
            "utility": self.utility.to_dict(),
            "gamma": self.gamma,
            "t_stale": self.t_stale,
            "scale": self.scale,
            "warmup_steps": self.warmup_steps,
            "freeze_utilities": self.freeze_utilities,
            "arena": self.arena,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        try:
            return cls(
                seed=int(d["seed"]),
                steps=int(d["steps"]),
                dt=float(d.get("dt", 1.0)),
                radars=tuple(_radar_from_dict(r) for r in d["radars"]),
                comm_edges=tuple((int(a), int(b)) for a, b in d.get("comm_edges", [])),
                targets=tuple(_target_from_dict(t) for t in d.get("targets", [])),
                utility=UtilityParams(**d.get("utility", {})),
                gamma=float(d.get("gamma", 1.0)),
                t_stale=d.get("t_stale"),
                scale=float(d.get("scale", 2.0)),
                warmup_steps=int(d.get("warmup_steps", 5)),
                freeze_utilities=bool(d.get("freeze_utilities", False)),
                arena=float(d.get("arena", 20_000.0)),
            )
        except (KeyError, TypeError) as exc:
            raise ScenarioError(f"malformed scenario: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path) -> "Scenario":
        with open(path) as fh:
            return cls.from_json(fh.read())

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json())
            fh.write("\n")


def _radar_to_dict(r: RadarSpec) -> dict:
    p = r.params
    return {
        "id": r.id,
        "position": list(p.position),
        "range_max": p.range_max,
        "sigma_r": p.noise.sigma_r,
        "sigma_theta": p.noise.sigma_theta,
        "snr": p.snr,
        "standby_snr": p.standby_snr,
        "budget": p.budget,
        "process_noise_intensity": p.process_noise_intensity,
        "v_radial_min": p.v_radial_min,
    }


def _radar_from_dict(d: dict) -> RadarSpec:
    defaults = RadarParams((0.0, 0.0))
    params = RadarParams(
        position=tuple(d["position"]),
        range_max=float(d.get("range_max", defaults.range_max)),
        noise=PolarNoise(
            float(d.get("sigma_r", defaults.noise.sigma_r)),
            float(d.get("sigma_theta", defaults.noise.sigma_theta)),
        ),
        snr=float(d.get("snr", defaults.snr)),
        standby_snr=float(d.get("standby_snr", defaults.standby_snr)),
        budget=float(d.get("budget", defaults.budget)),
        process_noise_intensity=float(d.get("process_noise_intensity", defaults.process_noise_intensity)),
        v_radial_min=float(d.get("v_radial_min", defaults.v_radial_min)),
    )
    return RadarSpec(int(d["id"]), params)


def _target_to_dict(t: TargetSpec) -> dict:
    d = {
        "id": t.id,
        "position": list(t.position),
        "velocity": list(t.velocity),
        "motion": t.motion,
    }
    if t.motion == WAYPOINTS:
        d["waypoints"] = [list(w) for w in t.waypoints]
    return d


def _target_from_dict(d: dict) -> TargetSpec:
    motion = d.get("motion", CONSTANT_VELOCITY)
    if motion not in (CONSTANT_VELOCITY, WAYPOINTS):
        raise ScenarioError(f"unknown motion model {motion!r}")
    return TargetSpec(
        id=int(d["id"]),
        position=tuple(float(v) for v in d["position"]),
        velocity=tuple(float(v) for v in d.get("velocity", (0.0, 0.0))),
        motion=motion,
        waypoints=tuple(tuple(float(v) for v in w) for w in d.get("waypoints", ())),
    )


def topology_edges(ids: list[int], topology: str, rng: np.random.Generator,
                   p_edge: float = 0.5, max_tries: int = 100) -> list[tuple[int, int]]:
    topology = topology.upper()
    n = len(ids)
    if topology == "COMPLETE":
        return [(ids[a], ids[b]) for a in range(n) for b in range(a + 1, n)]
    if topology == "LINE":
        return [(ids[a], ids[a + 1]) for a in range(n - 1)]
    if topology == "RING":
        edges = [(ids[a], ids[a + 1]) for a in range(n - 1)]
        if n > 2:
            edges.append((ids[0], ids[-1]))
        return edges
    if topology == "RANDOM_CONNECTED":
        if n <= 1:
            return []
        for _ in range(max_tries):
            edges = [(ids[a], ids[b]) for a in range(n) for b in range(a + 1, n) if rng.random() < p_edge]
            g = nx.Graph()
            g.add_nodes_from(ids)
            g.add_edges_from(edges)
            if nx.is_connected(g):
                return edges
        raise ScenarioError(f"no connected random graph after {max_tries} tries")
    raise ScenarioError(f"unknown topology {topology!r}; expected one of {TOPOLOGIES}")


def generate_scenario(
    n_radars: int,
    n_targets: int,
    *,
    arena: float = 20_000.0,
    seed: int = 0,
    topology: str = "COMPLETE",
    steps: int = 100,
    dt: float = 1.0,
    speed_range: tuple[float, float] = (5.0, 50.0),
    static: bool = False,
    range_max: float = 12_000.0,
    budget: float = 4.0,
    gamma: float = 1.0,
    noise: PolarNoise | None = None,
    utility: UtilityParams | None = None,
) -> Scenario:
    """Random scenario: radars on a jittered grid, targets uniform in the arena.

    ``static=True`` gives motionless targets and frozen utilities.
    """
    if n_radars < 1 or n_targets < 0:
        raise ScenarioError("need at least one radar and a non-negative number of targets")
    rng = np.random.default_rng(seed)
    cols = math.ceil(math.sqrt(n_radars))
    rows = math.ceil(n_radars / cols)
    cell_w, cell_h = arena / cols, arena / rows
    radars = []
    for i in range(n_radars):
        r, c = divmod(i, cols)
        jitter = rng.uniform(-0.25, 0.25, size=2)
        x = (c + 0.5 + jitter[0]) * cell_w
        y = (r + 0.5 + jitter[1]) * cell_h
        params = RadarParams(
            position=(float(x), float(y)),
            range_max=range_max,
            noise=noise or PolarNoise(1.0, 2e-4),
            snr=NOMINAL_SNR,
            budget=budget,
        )
        radars.append(RadarSpec(i, params))
    targets = []
    for j in range(n_targets):
        pos = rng.uniform(0.0, arena, size=2)
        speed = rng.uniform(*speed_range)
        heading = rng.uniform(0.0, 2.0 * math.pi)
        vel = (0.0, 0.0) if static else (speed * math.cos(heading), speed * math.sin(heading))
        targets.append(TargetSpec(j, (float(pos[0]), float(pos[1])), (float(vel[0]), float(vel[1]))))
    edges = topology_edges([r.id for r in radars], topology, rng)
    return Scenario(
        seed=seed,
        steps=steps,
        dt=dt,
        radars=tuple(radars),
        comm_edges=tuple(edges),
        targets=tuple(targets),
        utility=utility or UtilityParams(),
        gamma=gamma,
        freeze_utilities=static,
        arena=arena,
    )


class World:
    """Ground-truth target kinematics, advanced one step at a time."""

    def __init__(self, targets, dt: float):
        self.dt = dt
        self.specs = {t.id: t for t in targets}
        self.pos = {t.id: np.array(t.position, dtype=float) for t in targets}
        self.vel = {t.id: np.array(t.velocity, dtype=float) for t in targets}
        self.next_wp = {t.id: 0 for t in targets}

    def advance(self):
        for j in sorted(self.specs):
            spec = self.specs[j]
            if spec.motion == WAYPOINTS and self.next_wp[j] < len(spec.waypoints):
                self._follow_waypoints(j, spec)
            else:
                self.pos[j] = self.pos[j] + self.vel[j] * self.dt

    def _follow_waypoints(self, j, spec: TargetSpec):
        budget = spec.speed * self.dt
        pos = self.pos[j]
        while budget > 0 and self.next_wp[j] < len(spec.waypoints):
            goal = np.array(spec.waypoints[self.next_wp[j]], dtype=float)
            delta = goal - pos
            dist = float(np.hypot(*delta))
            if dist <= budget:
                pos = goal
                budget -= dist
                self.next_wp[j] += 1
                if dist > 0:
                    self.vel[j] = delta / dist * spec.speed
            else:
                self.vel[j] = delta / dist * spec.speed
                pos = pos + delta / dist * budget
                budget = 0.0
        if self.next_wp[j] >= len(spec.waypoints):
            self.vel[j] = np.zeros(2)
        self.pos[j] = pos

    def observations(self) -> dict:
        return {j: (self.pos[j].copy(), self.vel[j].copy()) for j in sorted(self.pos)}


def with_overrides(scenario: Scenario, **changes) -> Scenario:
    return replace(scenario, **changes)
