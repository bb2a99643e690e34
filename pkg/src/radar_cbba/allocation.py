"""Utility model shared by the auction and the centralized solver."""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .geometry import Ellipse, ellipse_area, intersection_area

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class UtilityParams:
    """Parameters of the main utility ``f`` and the pairing bonus ``alpha * g``.

    ``f(V) = u_max / (1 + V / v_ref)`` rewards small uncertainty areas;
    ``g(V) = 1 / (1 + V / v_ref)`` rewards small intersection areas. A
    nonempty intersection is always worth at least ``eps_min``.
    """

    u_max: float = 100.0
    alpha: float = 5.0
    eps_min: float = 0.01
    v_ref: float = 10.0

    def __post_init__(self):
        for name in ("u_max", "alpha", "eps_min", "v_ref"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    def to_dict(self) -> dict:
        return {"u_max": self.u_max, "alpha": self.alpha, "eps_min": self.eps_min, "v_ref": self.v_ref}


@dataclass(frozen=True)
class TaskCost:
    gamma: float = 1.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")


def main_value(area: float, params: UtilityParams) -> float:
    return params.u_max / (1.0 + area / params.v_ref)


def bonus_value(overlap: float, params: UtilityParams) -> float:
    """``alpha * g(overlap)``, floored at ``eps_min`` for any nonempty overlap."""
    if overlap <= 0.0:
        return 0.0
    return max(params.alpha / (1.0 + overlap / params.v_ref), params.eps_min)


def utility_main(ellipse: Ellipse, params: UtilityParams) -> float:
    return main_value(ellipse_area(ellipse), params)


def pair_bonus(main_ellipse: Ellipse, optional_ellipse: Ellipse, params: UtilityParams) -> float:
    """Extra utility an optional radar adds on top of the main radar's."""
    return bonus_value(intersection_area(main_ellipse, optional_ellipse), params)


def utility_pair(main_ellipse: Ellipse, optional_ellipse: Ellipse, params: UtilityParams) -> float:
    return utility_main(main_ellipse, params) + pair_bonus(main_ellipse, optional_ellipse, params)


def cbba_score(raw_utility: float, bundle_size: int) -> float:
    """Load-balancing bid: utility divided by the bundle size after adding the task."""
    if bundle_size < 0:
        raise ValueError("bundle_size must be non-negative")
    return raw_utility / (bundle_size + 1)


def dominance_holds(main_utility: float, bonus: float, ratio: float = 10.0) -> bool:
    """Whether the main term dominates the bonus by at least ``ratio``."""
    return main_utility >= ratio * bonus


class DominanceMonitor:
    """Counts pairs where the bonus is not negligible against ``f`` and warns once."""

    def __init__(self, ratio: float = 10.0):
        self.ratio = ratio
        self.checked = 0
        self.violations = 0

    def check(self, main_utility: float, bonus: float) -> bool:
        self.checked += 1
        ok = dominance_holds(main_utility, bonus, self.ratio)
        if not ok:
            if self.violations == 0:
                log.warning(
                    "pairing bonus %.4g is not %gx smaller than main utility %.4g; "
                    "consider lowering alpha",
                    bonus, self.ratio, main_utility,
                )
            self.violations += 1
        return ok
