"""Constant-velocity Kalman tracking of targets from noisy radar plots.

Filtering happens in the global Cartesian frame with state
``(x, y, vx, vy)``. Polar geometry only enters through the measurement
covariance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import Ellipse, PolarNoise, azimuth, measurement_covariance

NOMINAL_SNR = 13.0
DEFAULT_Q = 0.5
V_INIT = 50.0**2

H = np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]])


class TrackingError(ArithmeticError):
    pass


@dataclass(frozen=True)
class TrackState:
    state: np.ndarray
    covariance: np.ndarray
    last_update: int = 0

    @property
    def position(self) -> np.ndarray:
        return self.state[:2]

    @property
    def velocity(self) -> np.ndarray:
        return self.state[2:]


@dataclass(frozen=True)
class RadarParams:
    """Static description of one radar.

    ``budget`` is the per-step radar-time budget, ``snr`` the signal to noise
    ratio of active tracking dwells and ``standby_snr`` the (lower) ratio of
    the surveillance scan that keeps coarse tracks on every target in range.
    """

    position: tuple[float, float]
    range_max: float = 12_000.0
    noise: PolarNoise = field(default_factory=lambda: PolarNoise(1.0, 2e-4))
    snr: float = NOMINAL_SNR
    budget: float = 4.0
    process_noise_intensity: float = DEFAULT_Q
    standby_snr: float = NOMINAL_SNR / 4.0
    v_radial_min: float = 0.0

    def __post_init__(self):
        if not self.range_max > 0:
            raise ValueError(f"range_max must be positive, got {self.range_max}")
        if not self.budget > 0:
            raise ValueError(f"budget must be positive, got {self.budget}")
        if not (self.snr > 0 and self.standby_snr > 0):
            raise ValueError("snr must be positive")
        object.__setattr__(self, "position", (float(self.position[0]), float(self.position[1])))


def cv_transition(dt: float) -> np.ndarray:
    f = np.eye(4)
    f[0, 2] = f[1, 3] = dt
    return f


def cv_process_noise(dt: float, q: float) -> np.ndarray:
    """White-noise-acceleration covariance for one step of length ``dt``."""
    q11 = dt**3 / 3.0
    q12 = dt**2 / 2.0
    return q * np.array(
        [
            [q11, 0.0, q12, 0.0],
            [0.0, q11, 0.0, q12],
            [q12, 0.0, dt, 0.0],
            [0.0, q12, 0.0, dt],
        ]
    )


def _sym(p: np.ndarray) -> np.ndarray:
    return 0.5 * (p + p.T)


def predict(t: TrackState, dt: float, q: float = DEFAULT_Q) -> TrackState:
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    f = cv_transition(dt)
    p = f @ t.covariance @ f.T
    if q:
        p = p + cv_process_noise(dt, q)
    return replace(t, state=f @ t.state, covariance=_sym(p))


def update(t: TrackState, z, rm, step: int | None = None) -> TrackState:
    """Kalman update with a Cartesian position measurement (Joseph form)."""
    z = np.asarray(z, dtype=float)
    rm = np.asarray(rm, dtype=float)
    p = t.covariance
    s = H @ p @ H.T + rm
    try:
        gain = np.linalg.solve(s, H @ p).T
    except np.linalg.LinAlgError as exc:
        raise TrackingError("singular innovation covariance") from exc
    x = t.state + gain @ (z - H @ t.state)
    ikh = np.eye(4) - gain @ H
    p = ikh @ p @ ikh.T + gain @ rm @ gain.T
    last = t.last_update if step is None else step
    if last < t.last_update:
        raise ValueError("track updates must not go back in time")
    return TrackState(x, _sym(p), last)


def initiate(z, rm, step: int = 0, v_init: float = V_INIT) -> TrackState:
    """New track from a first detection: position at the plot, zero velocity."""
    p = np.zeros((4, 4))
    p[:2, :2] = np.asarray(rm, dtype=float)
    p[2, 2] = p[3, 3] = v_init
    z = np.asarray(z, dtype=float)
    return TrackState(np.array([z[0], z[1], 0.0, 0.0]), p, step)


def prediction_ellipse(t: TrackState, scale: float = 2.0) -> Ellipse:
    """Uncertainty ellipse of the track's position.

    Pass a track that has already been predicted to the time of interest.
    """
    return Ellipse(t.state[:2], t.covariance[:2, :2], scale)


def effective_noise(noise: PolarNoise, snr: float) -> PolarNoise:
    k = math.sqrt(NOMINAL_SNR / snr)
    return PolarNoise(noise.sigma_r * k, noise.sigma_theta * k)


def in_range(radar: RadarParams, truth) -> bool:
    dx = float(truth[0]) - radar.position[0]
    dy = float(truth[1]) - radar.position[1]
    return math.hypot(dx, dy) <= radar.range_max


def radially_eligible(radar: RadarParams, truth, velocity) -> bool:
    """Whether the target's radial speed is large enough to be followed."""
    if radar.v_radial_min <= 0:
        return True
    dx = float(truth[0]) - radar.position[0]
    dy = float(truth[1]) - radar.position[1]
    r = math.hypot(dx, dy)
    if r == 0:
        return False
    vr = (dx * float(velocity[0]) + dy * float(velocity[1])) / r
    return abs(vr) >= radar.v_radial_min


def measure(radar: RadarParams, truth, rng: np.random.Generator, snr: float | None = None):
    """Simulate one plot of a target at ``truth``.

    Returns ``(z, rm)`` or ``None`` when the target is out of range.
    """
    if not in_range(radar, truth):
        return None
    dx = float(truth[0]) - radar.position[0]
    dy = float(truth[1]) - radar.position[1]
    r = max(math.hypot(dx, dy), 1.0)
    noise = effective_noise(radar.noise, radar.snr if snr is None else snr)
    rm = measurement_covariance(r, azimuth(dx, dy), noise)
    z = rng.multivariate_normal(np.asarray(truth, dtype=float)[:2], rm, method="cholesky")
    return z, rm
