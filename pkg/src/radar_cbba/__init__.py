"""Decentralized radar-target allocation with a two-round consensus-based bundle auction."""

from .allocation import TaskCost, UtilityParams, cbba_score, utility_main, utility_pair
from .cbba import BeliefState, CbbaMessage, RadarAgent, Round, consensus_update, forget_stale, step_radar
from .geometry import Ellipse, PolarNoise, ellipse_area, ellipse_contains, intersection_area, measurement_covariance
from .oracle import Assignment, CapacityError, ProblemInstance, evaluate, solve_p1, solve_p2
from .tracking import RadarParams, TrackState, measure, predict, prediction_ellipse, update

__version__ = "0.1.0"

__all__ = [
    "Assignment", "BeliefState", "CapacityError", "CbbaMessage", "Ellipse", "PolarNoise", "ProblemInstance",
    "RadarAgent", "RadarParams", "Round", "TaskCost", "TrackState", "UtilityParams", "cbba_score",
    "consensus_update", "ellipse_area", "ellipse_contains", "evaluate", "forget_stale", "intersection_area",
    "measure", "measurement_covariance", "predict", "prediction_ellipse", "solve_p1", "solve_p2", "step_radar",
    "update", "utility_main", "utility_pair",
]
