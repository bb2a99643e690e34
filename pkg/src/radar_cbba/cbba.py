"""Two-round consensus-based bundle auction run by every radar.

Each radar keeps one :class:`BeliefState` per round. In the main round it
bids to become the single main radar of a target; in the optional round it
bids to be the second radar of a target whose main radar is someone else,
competing only on the pairing bonus. Bids are recomputed every step and the
auction is never closed, so winners change as targets move.

Belief maps only hold claimed targets: a target absent from ``y``/``z`` has
no known winner and a zero winning bid.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .allocation import UtilityParams, cbba_score, pair_bonus, utility_main
from .geometry import Ellipse, GeometryError
from .tracking import (
    RadarParams,
    TrackState,
    in_range,
    initiate,
    measure,
    predict,
    prediction_ellipse,
    radially_eligible,
    update,
)

BID_TOL = 1e-9


class Round(str, enum.Enum):
    MAIN = "MAIN"
    OPTIONAL = "OPTIONAL"


@dataclass
class BeliefState:
    round: Round
    y: dict = field(default_factory=dict)
    z: dict = field(default_factory=dict)
    s: dict = field(default_factory=dict)
    e: dict = field(default_factory=dict)
    bundle: list = field(default_factory=list)
    path_utilities: dict = field(default_factory=dict)

    def copy(self) -> "BeliefState":
        return BeliefState(
            self.round, dict(self.y), dict(self.z), dict(self.s), dict(self.e),
            list(self.bundle), dict(self.path_utilities),
        )

    def winner(self, j):
        return self.z.get(j)

    def winning_bid(self, j) -> float:
        return self.y.get(j, 0.0)

    def clear(self, j):
        self.y.pop(j, None)
        self.z.pop(j, None)
        self.e.pop(j, None)

    def claim(self, j, bid: float, who, ellipse: Ellipse | None = None):
        self.y[j] = bid
        self.z[j] = who
        if self.round is Round.MAIN and ellipse is not None:
            self.e[j] = ellipse

    def truncate(self, pos: int, me):
        """Drop bundle entries from ``pos`` on, clearing the ones still claimed by ``me``."""
        for j in self.bundle[pos:]:
            if self.z.get(j) == me:
                self.clear(j)
            self.path_utilities.pop(j, None)
        del self.bundle[pos:]

    def remove_from_bundle(self, j, me):
        if j in self.bundle:
            self.bundle.remove(j)
            self.path_utilities.pop(j, None)
        if self.z.get(j) == me:
            self.clear(j)

    def agreement_key(self) -> tuple:
        """``(y, z)`` in a canonical, comparable form."""
        return tuple(sorted(self.z.items())), tuple(sorted(self.y.items()))


@dataclass(frozen=True)
class CbbaMessage:
    sender: int
    send_time: int
    round: Round
    y: dict
    z: dict
    s: dict
    e: dict | None = None

    def to_dict(self) -> dict:
        d = {
            "sender": self.sender,
            "send_time": self.send_time,
            "round": self.round.value,
            "y": {str(j): v for j, v in sorted(self.y.items())},
            "z": {str(j): v for j, v in sorted(self.z.items())},
            "s": {str(r): v for r, v in sorted(self.s.items())},
        }
        if self.e is not None:
            d["e"] = {str(j): el.to_dict() for j, el in sorted(self.e.items())}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CbbaMessage":
        e = d.get("e")
        return cls(
            sender=d["sender"],
            send_time=d["send_time"],
            round=Round(d["round"]),
            y={int(j): float(v) for j, v in d["y"].items()},
            z={int(j): v for j, v in d["z"].items()},
            s={int(r): v for r, v in d["s"].items()},
            e=None if e is None else {int(j): Ellipse.from_dict(v) for j, v in e.items()},
        )


def make_message(belief: BeliefState, sender: int, now: int) -> CbbaMessage:
    s = dict(belief.s)
    s[sender] = now
    e = dict(belief.e) if belief.round is Round.MAIN else None
    return CbbaMessage(sender, now, belief.round, dict(belief.y), dict(belief.z), s, e)


@dataclass(frozen=True)
class TargetView:
    """What a radar currently knows about one perceivable target."""

    ellipse: Ellipse
    utility: float
    velocity: tuple[float, float] = (0.0, 0.0)


@dataclass
class BidContext:
    radar_id: int
    budget: float
    gamma: float
    views: dict
    params: UtilityParams
    now: int = 0
    dt: float = 1.0


def outbids(bid: float, bidder, standing: float, holder) -> bool:
    """Total order on bids: higher value wins, near-equal values go to the lower id."""
    if holder is None:
        return bid > BID_TOL
    if bid > standing + BID_TOL:
        return True
    return abs(bid - standing) <= BID_TOL and bidder < holder


def _bundle_cost(belief: BeliefState, gamma: float) -> float:
    return gamma * len(belief.bundle)


def select_main(ctx: BidContext, belief: BeliefState, optional: BeliefState | None = None):
    """Main-round bundle construction.

    Held targets are re-priced at their bundle position; a held target that
    is no longer perceivable is released with everything after it. Then the
    bundle is extended greedily. Budget held by optional tasks counts as
    available: when a main addition needs it, optional tasks are dropped,
    lowest bid first.

    Returns ``(main_belief, optional_belief)``; the second item is ``None``
    when no optional belief was given.
    """
    me = ctx.radar_id
    b = belief.copy()
    o = optional.copy() if optional is not None else None

    for pos, j in enumerate(b.bundle):
        if b.z.get(j) != me or j not in ctx.views:
            b.truncate(pos, me)
            break
    for pos, j in enumerate(b.bundle):
        view = ctx.views[j]
        bid = cbba_score(view.utility, pos)
        b.claim(j, bid, me, view.ellipse)
        b.path_utilities[j] = bid

    while True:
        used = _bundle_cost(b, ctx.gamma)
        if used + ctx.gamma > ctx.budget + BID_TOL:
            break
        best, best_score = None, -math.inf
        size = len(b.bundle)
        for j in sorted(ctx.views):
            if j in b.path_utilities:
                continue
            score = cbba_score(ctx.views[j].utility, size)
            if score > best_score and outbids(score, me, b.winning_bid(j), b.winner(j)):
                best, best_score = j, score
        if best is None:
            break
        if o is not None:
            if best in o.path_utilities:
                o.remove_from_bundle(best, me)
            while o.bundle and used + ctx.gamma + _bundle_cost(o, ctx.gamma) > ctx.budget + BID_TOL:
                lowest = min(o.bundle, key=lambda j: (o.path_utilities[j], j))
                o.remove_from_bundle(lowest, me)
        b.bundle.append(best)
        b.path_utilities[best] = best_score
        b.claim(best, best_score, me, ctx.views[best].ellipse)
    return b, o


def optional_bonus(ctx: BidContext, main: BeliefState, j) -> float:
    """Pairing bonus this radar would add to ``j``, or 0 if it is not eligible."""
    me = ctx.radar_id
    holder = main.z.get(j)
    if holder is None or holder == me or j not in main.e or j not in ctx.views:
        return 0.0
    view = ctx.views[j]
    main_ellipse = main.e[j]
    # s[holder] is when the holder's news arrived; the ellipse it carried was
    # computed one step earlier. Move it along our own velocity estimate so
    # both ellipses describe the same instant.
    if holder in main.s:
        age = ctx.now - main.s[holder] + 1
    else:
        age = 0
    if age > 0:
        vx, vy = view.velocity
        main_ellipse = main_ellipse.translated(vx * age * ctx.dt, vy * age * ctx.dt)
    return pair_bonus(main_ellipse, view.ellipse, ctx.params)


def select_optional(ctx: BidContext, belief_opt: BeliefState, main: BeliefState) -> BeliefState:
    """Optional-round bundle construction with the budget left by the main round."""
    me = ctx.radar_id
    o = belief_opt.copy()
    bonus = {j: optional_bonus(ctx, main, j) for j in sorted(ctx.views)}

    for pos, j in enumerate(o.bundle):
        if o.z.get(j) != me or bonus.get(j, 0.0) <= 0.0:
            o.truncate(pos, me)
            break
    for pos, j in enumerate(o.bundle):
        bid = cbba_score(bonus[j], pos)
        o.claim(j, bid, me)
        o.path_utilities[j] = bid

    budget = ctx.budget - _bundle_cost(main, ctx.gamma)
    while True:
        if _bundle_cost(o, ctx.gamma) + ctx.gamma > budget + BID_TOL:
            break
        best, best_score = None, -math.inf
        size = len(o.bundle)
        for j, value in bonus.items():
            if value <= 0.0 or j in o.path_utilities:
                continue
            score = cbba_score(value, size)
            if score > best_score and outbids(score, me, o.winning_bid(j), o.winner(j)):
                best, best_score = j, score
        if best is None:
            break
        o.bundle.append(best)
        o.path_utilities[best] = best_score
        o.claim(best, best_score, me)
    return o


LEAVE, UPDATE, RESET = "leave", "update", "reset"


def _action(me, k, zk, yk, zi, yi, s_send, s_recv) -> str:
    """Conflict-resolution table for one target (sender ``k``, receiver ``me``)."""

    def fresher(m):
        return s_send(m) > s_recv(m)

    if zk == k:
        if zi == me:
            return UPDATE if outbids(yk, k, yi, me) else LEAVE
        if zi == k or zi is None:
            return UPDATE
        return UPDATE if fresher(zi) or outbids(yk, k, yi, zi) else LEAVE
    if zk == me:
        if zi == me or zi is None:
            return LEAVE
        if zi == k:
            return RESET
        return RESET if fresher(zi) else LEAVE
    if zk is not None:
        m = zk
        if zi == me:
            return UPDATE if fresher(m) and outbids(yk, m, yi, me) else LEAVE
        if zi == k:
            return UPDATE if s_send(m) > s_recv(k) else RESET
        if zi == m:
            return UPDATE if fresher(m) else LEAVE
        if zi is None:
            return UPDATE if fresher(m) else LEAVE
        n = zi
        if fresher(m) and fresher(n):
            return UPDATE
        if fresher(m) and outbids(yk, m, yi, n):
            return UPDATE
        if fresher(n) and s_recv(m) > s_send(m):
            return RESET
        return LEAVE
    # sender knows no winner
    if zi == me or zi is None:
        return LEAVE
    if zi == k:
        return UPDATE
    return UPDATE if fresher(zi) else LEAVE


def consensus_update(belief: BeliefState, msg: CbbaMessage, self_id, now: int) -> BeliefState:
    """Merge one neighbour message into ``belief``.

    Losing a held target releases it and every target added after it.
    Timestamps are merged after the per-target decisions.
    """
    if msg.sender == self_id:
        return belief
    if msg.round != belief.round:
        raise ValueError(f"message round {msg.round} does not match belief round {belief.round}")
    b = belief.copy()
    k = msg.sender
    before = belief.s

    def s_send(m):
        return msg.s.get(m, -1)

    def s_recv(m):
        return before.get(m, -1)

    for j in sorted(set(b.z) | set(msg.z)):
        zk, yk = msg.z.get(j), msg.y.get(j, 0.0)
        zi, yi = b.z.get(j), b.y.get(j, 0.0)
        act = _action(self_id, k, zk, yk, zi, yi, s_send, s_recv)
        if act == UPDATE:
            if zk is None:
                b.clear(j)
            else:
                b.y[j], b.z[j] = yk, zk
                if b.round is Round.MAIN:
                    if msg.e is not None and j in msg.e:
                        b.e[j] = msg.e[j]
                    else:
                        b.e.pop(j, None)
        elif act == RESET:
            b.clear(j)

    for pos, j in enumerate(b.bundle):
        if b.z.get(j) != self_id:
            b.truncate(pos, self_id)
            break

    for m, t in msg.s.items():
        if m != self_id:
            b.s[m] = max(b.s.get(m, -1), t)
    b.s[k] = now
    return b


def forget_stale(belief: BeliefState, last_seen: dict, now: int, t_stale: int) -> BeliefState:
    """Delete all knowledge of targets nobody has reported for more than ``t_stale`` steps."""
    if t_stale < 1:
        raise ValueError("t_stale must be at least 1")
    known = set(belief.z) | set(belief.e) | set(belief.bundle)
    stale = {j for j in known if now - last_seen.get(j, -math.inf) > t_stale}
    if not stale:
        return belief
    b = belief.copy()
    for j in stale:
        b.clear(j)
        b.path_utilities.pop(j, None)
    b.bundle = [j for j in b.bundle if j not in stale]
    return b


class RadarAgent:
    """One autonomous radar: tracks, beliefs for both rounds, and its random stream.

    The only way agents interact is through the :class:`CbbaMessage` values
    returned by :meth:`step`.
    """

    def __init__(
        self,
        radar_id: int,
        params: RadarParams,
        *,
        utility: UtilityParams,
        gamma: float = 1.0,
        scale: float = 2.0,
        dt: float = 1.0,
        t_stale: int = 10,
        seed: int = 0,
    ):
        self.id = radar_id
        self.params = params
        self.utility = utility
        self.gamma = gamma
        self.scale = scale
        self.dt = dt
        self.t_stale = t_stale
        self.rng = np.random.default_rng([seed, radar_id])
        self.tracks: dict[int, TrackState] = {}
        self.track_time: dict[int, int] = {}
        self.last_seen: dict[int, int] = {}
        self.main = BeliefState(Round.MAIN)
        self.optional = BeliefState(Round.OPTIONAL)
        self.views: dict[int, TargetView] = {}
        self.frozen_views: dict[int, TargetView] | None = None

    # -- tracking -------------------------------------------------------

    def perceivable(self, observations: dict) -> list[int]:
        return [
            j for j, (pos, vel) in sorted(observations.items())
            if in_range(self.params, pos) and radially_eligible(self.params, pos, vel)
        ]

    def predict_tracks(self, now: int):
        q = self.params.process_noise_intensity
        for j in sorted(self.tracks):
            lag = now - self.track_time[j]
            if lag > 0:
                self.tracks[j] = predict(self.tracks[j], lag * self.dt, q)
                self.track_time[j] = now

    def compute_views(self, perceivable) -> dict[int, TargetView]:
        views = {}
        for j in perceivable:
            track = self.tracks.get(j)
            if track is None:
                continue
            try:
                ell = prediction_ellipse(track, self.scale)
            except GeometryError:
                continue
            vx, vy = track.state[2:]
            views[j] = TargetView(ell, utility_main(ell, self.utility), (float(vx), float(vy)))
        return views

    def scan(self, observations: dict, perceivable, now: int, active=frozenset()):
        """Measure every perceivable target; active ones get a tracking dwell."""
        for j in perceivable:
            pos = observations[j][0]
            snr = self.params.snr if j in active else self.params.standby_snr
            plot = measure(self.params, pos, self.rng, snr=snr)
            if plot is None:
                continue
            z, rm = plot
            if j in self.tracks:
                self.tracks[j] = update(self.tracks[j], z, rm, step=now)
            else:
                self.tracks[j] = initiate(z, rm, step=now)
            self.track_time[j] = now

    def warm_up(self, observations: dict, now: int):
        """Surveillance-only step used before the first auction."""
        self.predict_tracks(now)
        seen = self.perceivable(observations)
        for j in seen:
            self.last_seen[j] = now
        self.scan(observations, seen, now)

    def freeze(self, observations: dict, now: int):
        """Fix the bidding views to the current tracks (static benchmarks)."""
        self.predict_tracks(now)
        self.frozen_views = self.compute_views(self.perceivable(observations))

    # -- protocol -------------------------------------------------------

    def context(self, now: int = 0) -> BidContext:
        return BidContext(self.id, self.params.budget, self.gamma, self.views, self.utility, now, self.dt)

    def _note_claims(self, msg: CbbaMessage):
        for j, who in msg.z.items():
            if who == self.id:
                continue
            t = msg.s.get(who, msg.send_time)
            if t > self.last_seen.get(j, -1):
                self.last_seen[j] = t

    def _forget(self, now: int):
        self.main = forget_stale(self.main, self.last_seen, now, self.t_stale)
        self.optional = forget_stale(self.optional, self.last_seen, now, self.t_stale)
        for j in [j for j in self.tracks if now - self.last_seen.get(j, -math.inf) > self.t_stale]:
            del self.tracks[j]
            del self.track_time[j]
        for j in [j for j, t in self.last_seen.items() if now - t > self.t_stale]:
            del self.last_seen[j]

    def step(self, inbox, observations: dict, now: int):
        """One pass of the per-step loop; returns ``(outbox, tracked targets)``."""
        seen = self.perceivable(observations)
        for j in seen:
            self.last_seen[j] = now
        if self.frozen_views is None:
            self.predict_tracks(now)
            self.views = self.compute_views(seen)
        else:
            self.views = {j: v for j, v in self.frozen_views.items() if j in set(seen)}

        ctx = self.context(now)
        self.main, self.optional = select_main(ctx, self.main, self.optional)
        self.optional = select_optional(ctx, self.optional, self.main)

        inbox = sorted(inbox, key=lambda m: (m.sender, m.round.value))
        for msg in inbox:
            if msg.round is Round.MAIN:
                self._note_claims(msg)
                self.main = consensus_update(self.main, msg, self.id, now)
        for msg in inbox:
            if msg.round is Round.OPTIONAL:
                self._note_claims(msg)
                self.optional = consensus_update(self.optional, msg, self.id, now)
        self._forget(now)
        self.main.s[self.id] = now
        self.optional.s[self.id] = now
        outbox = [make_message(self.main, self.id, now), make_message(self.optional, self.id, now)]

        active = set(self.main.bundle) | set(self.optional.bundle)
        if self.frozen_views is None:
            self.scan(observations, seen, now, active)
        return outbox, active

    @property
    def load(self) -> float:
        return self.gamma * (len(self.main.bundle) + len(self.optional.bundle))


def step_radar(agent: RadarAgent, inbox, observations: dict, now: int):
    return agent.step(inbox, observations, now)
