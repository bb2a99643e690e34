"""Uncertainty ellipses: construction, area and pairwise intersection area.

Ellipses are immutable and hashable so intersection results can be cached
across simulation steps. The intersection is computed on inscribed convex
polygons (64 vertices by default), which keeps the computation deterministic
and free of root finding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

N_VERTICES = 64
MAX_CONDITION = 1e12


class GeometryError(ValueError):
    """Raised for invalid ellipse or noise parameters."""


@dataclass(frozen=True)
class PolarNoise:
    sigma_r: float
    sigma_theta: float

    def __post_init__(self):
        if not (self.sigma_r > 0 and self.sigma_theta > 0):
            raise GeometryError(
                f"noise terms must be positive, got sigma_r={self.sigma_r}, "
                f"sigma_theta={self.sigma_theta}"
            )


@dataclass(frozen=True)
class Ellipse:
    """Confidence ellipse ``{p : (p-c)^T S^-1 (p-c) <= scale^2}``.

    ``center`` is stored as ``(x, y)`` and ``shape`` as the upper triangle
    ``(sxx, sxy, syy)`` of the symmetric covariance, so both are plain
    tuples of floats. Array inputs are accepted and normalized.
    """

    center: tuple[float, float]
    shape: tuple[float, float, float]
    scale: float = 2.0

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float).reshape(-1)
        if c.shape != (2,) or not np.all(np.isfinite(c)):
            raise GeometryError(f"center must be a finite 2-vector, got {self.center!r}")
        s = np.asarray(self.shape, dtype=float)
        if s.shape == (2, 2):
            tol = 1e-9 * max(1.0, float(np.max(np.abs(s))))
            if abs(s[0, 1] - s[1, 0]) > tol:
                raise GeometryError("shape matrix is not symmetric")
            sxx, sxy, syy = float(s[0, 0]), 0.5 * float(s[0, 1] + s[1, 0]), float(s[1, 1])
        elif s.shape == (3,):
            sxx, sxy, syy = (float(v) for v in s)
        else:
            raise GeometryError(f"shape must be 2x2 or (sxx, sxy, syy), got {s.shape}")
        scale = float(self.scale)
        if not scale > 0:
            raise GeometryError(f"scale must be positive, got {self.scale}")
        lo, hi = _eigenvalues(sxx, sxy, syy)
        if not (math.isfinite(hi) and lo > 0):
            raise GeometryError("shape matrix is not positive definite")
        if hi / lo > MAX_CONDITION:
            raise GeometryError(f"shape matrix is near singular (condition {hi / lo:.3g})")
        object.__setattr__(self, "center", (float(c[0]), float(c[1])))
        object.__setattr__(self, "shape", (sxx, sxy, syy))
        object.__setattr__(self, "scale", scale)

    @property
    def center_array(self) -> np.ndarray:
        return np.array(self.center)

    @property
    def shape_matrix(self) -> np.ndarray:
        sxx, sxy, syy = self.shape
        return np.array([[sxx, sxy], [sxy, syy]])

    @property
    def area(self) -> float:
        return ellipse_area(self)

    def bounding_box(self) -> tuple[float, float, float, float]:
        """Axis-aligned ``(xmin, ymin, xmax, ymax)``."""
        sxx, _, syy = self.shape
        hx = self.scale * math.sqrt(sxx)
        hy = self.scale * math.sqrt(syy)
        cx, cy = self.center
        return cx - hx, cy - hy, cx + hx, cy + hy

    def axes(self) -> tuple[float, float, float]:
        """Semi-major axis, semi-minor axis and major-axis angle (rad, from +x)."""
        sxx, sxy, syy = self.shape
        lo, hi = _eigenvalues(sxx, sxy, syy)
        phi = 0.5 * math.atan2(2.0 * sxy, sxx - syy)
        return self.scale * math.sqrt(hi), self.scale * math.sqrt(lo), phi

    def translated(self, dx: float, dy: float) -> "Ellipse":
        return Ellipse((self.center[0] + dx, self.center[1] + dy), self.shape, self.scale)

    def polygon(self, n: int = N_VERTICES) -> list[tuple[float, float]]:
        """Inscribed polygon, counter-clockwise.

        Vertices are laid out along the principal axes, so rotating the
        ellipse rotates the vertex set with it.
        """
        return list(_polygon(self, n))

    def to_dict(self) -> dict:
        sxx, sxy, syy = self.shape
        return {
            "center": [self.center[0], self.center[1]],
            "shape": [[sxx, sxy], [sxy, syy]],
            "scale": self.scale,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Ellipse":
        return cls(tuple(d["center"]), np.asarray(d["shape"], dtype=float), d.get("scale", 2.0))


def _eigenvalues(sxx: float, sxy: float, syy: float) -> tuple[float, float]:
    mean = 0.5 * (sxx + syy)
    rad = math.hypot(0.5 * (sxx - syy), sxy)
    hi = mean + rad
    # det / hi is the numerically stable form of the small root
    lo = (sxx * syy - sxy * sxy) / hi if hi > 0 else mean - rad
    return lo, hi


def rotation(theta: float) -> np.ndarray:
    """Rotation by azimuth ``theta``, measured clockwise from +x."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])


def azimuth(dx: float, dy: float) -> float:
    """Clockwise azimuth of the offset ``(dx, dy)``, matching :func:`rotation`."""
    return math.atan2(-dy, dx)


def measurement_covariance(r: float, theta: float, noise: PolarNoise) -> np.ndarray:
    """Cartesian covariance of a polar measurement at range ``r``, azimuth ``theta``.

    ``theta`` is the clockwise azimuth of the line of sight (see
    :func:`azimuth`); the range axis of the result points along it. Azimuth
    noise enters as arc length ``r * sigma_theta``.
    """
    if not r > 0:
        raise GeometryError(f"range must be positive, got {r}")
    rot = rotation(theta)
    d = np.diag([noise.sigma_r**2, (r * noise.sigma_theta) ** 2])
    k = rot @ d @ rot.T
    return 0.5 * (k + k.T)


def ellipse_area(e: Ellipse) -> float:
    sxx, sxy, syy = e.shape
    det = sxx * syy - sxy * sxy
    if not det > 0:
        raise GeometryError("shape matrix is not positive definite")
    return math.pi * e.scale**2 * math.sqrt(det)


def ellipse_contains(e: Ellipse, p) -> bool:
    sxx, sxy, syy = e.shape
    dx = float(p[0]) - e.center[0]
    dy = float(p[1]) - e.center[1]
    det = sxx * syy - sxy * sxy
    # (p-c)^T S^-1 (p-c) via the adjugate
    q = (syy * dx * dx - 2.0 * sxy * dx * dy + sxx * dy * dy) / det
    return q <= e.scale**2


CIRCLE_TOL = 1e-9


def _is_circle(e: Ellipse) -> bool:
    lo, hi = _eigenvalues(*e.shape)
    return hi - lo <= CIRCLE_TOL * hi


def _orientation(e: Ellipse, other: Ellipse) -> float:
    """Vertex layout angle for ``e`` when intersected with ``other``.

    A circle has no principal axes, so its polygon is aligned with something
    that moves with the pair instead: the line between the centers or, for
    concentric pairs, the axes of the other ellipse. This keeps the result
    invariant under rotating both ellipses.
    """
    if not _is_circle(e):
        return e.axes()[2]
    dx = other.center[0] - e.center[0]
    dy = other.center[1] - e.center[1]
    if math.hypot(dx, dy) > CIRCLE_TOL * e.axes()[0]:
        return math.atan2(dy, dx)
    if not _is_circle(other):
        return other.axes()[2]
    return 0.0


@lru_cache(maxsize=4096)
def _polygon(e: Ellipse, n: int, phi: float | None = None) -> tuple[tuple[float, float], ...]:
    a, b, axis = e.axes()
    if phi is None:
        phi = axis
    c, s = math.cos(phi), math.sin(phi)
    cx, cy = e.center
    pts = []
    for k in range(n):
        t = 2.0 * math.pi * k / n
        u, v = a * math.cos(t), b * math.sin(t)
        pts.append((cx + c * u - s * v, cy + s * u + c * v))
    return tuple(pts)


@lru_cache(maxsize=4096)
def _polygon_array(e: Ellipse, n: int, phi: float | None = None) -> np.ndarray:
    arr = np.array(_polygon(e, n, phi))
    arr.flags.writeable = False
    return arr


@lru_cache(maxsize=None)
def _area_correction(n: int) -> float:
    return 2.0 * math.pi / (n * math.sin(2.0 * math.pi / n))


def polygon_area(poly) -> float:
    """Shoelace area (positive for counter-clockwise input)."""
    pts = np.asarray(poly, dtype=float)
    if len(pts) < 3:
        return 0.0
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _inside_mask(pts: np.ndarray, poly: np.ndarray) -> np.ndarray:
    a = np.roll(poly, 1, axis=0)
    e = poly - a
    rel = pts[:, None, :] - a[None, :, :]
    side = e[None, :, 0] * rel[:, :, 1] - e[None, :, 1] * rel[:, :, 0]
    tol = 1e-12 * float(np.max(np.abs(side))) if side.size else 0.0
    return np.all(side >= -tol, axis=1)


def _edge_crossings(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    p0 = np.roll(p, 1, axis=0)
    r = p - p0
    q0 = np.roll(q, 1, axis=0)
    s = q - q0
    denom = r[:, None, 0] * s[None, :, 1] - r[:, None, 1] * s[None, :, 0]
    d = q0[None, :, :] - p0[:, None, :]
    t_num = d[:, :, 0] * s[None, :, 1] - d[:, :, 1] * s[None, :, 0]
    u_num = d[:, :, 0] * r[:, None, 1] - d[:, :, 1] * r[:, None, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = t_num / denom
        u = u_num / denom
    ok = (denom != 0.0) & (t >= 0.0) & (t <= 1.0) & (u >= 0.0) & (u <= 1.0)
    ii, _ = np.nonzero(ok)
    return p0[ii] + t[ok][:, None] * r[ii]


def convex_intersection(p, q) -> np.ndarray:
    """Vertices (CCW) of the intersection of two convex CCW polygons.

    Collects vertices of each polygon lying inside the other plus all edge
    crossings, then orders them by angle around their mean.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    pts = np.concatenate([p[_inside_mask(p, q)], q[_inside_mask(q, p)], _edge_crossings(p, q)])
    if len(pts) < 3:
        return np.empty((0, 2))
    c = pts.mean(axis=0)
    d = pts - c
    ang = np.arctan2(d[:, 1], d[:, 0])
    order = np.lexsort((np.hypot(d[:, 0], d[:, 1]), ang))
    return pts[order]


def _boxes_overlap(a: Ellipse, b: Ellipse) -> bool:
    ax0, ay0, ax1, ay1 = a.bounding_box()
    bx0, by0, bx1, by1 = b.bounding_box()
    return ax0 <= bx1 and bx0 <= ax1 and ay0 <= by1 and by0 <= ay1


def _key(e: Ellipse) -> tuple:
    return (e.center, e.shape, e.scale)


@lru_cache(maxsize=65536)
def _intersection_ordered(a: Ellipse, b: Ellipse, n: int) -> float:
    if not _boxes_overlap(a, b):
        return 0.0
    pa = _polygon_array(a, n, _orientation(a, b))
    pb = _polygon_array(b, n, _orientation(b, a))
    poly = convex_intersection(pa, pb)
    # inscribed polygons lose a fixed fraction of area; undo it so that
    # identical ellipses report their exact area
    return max(0.0, polygon_area(poly)) * _area_correction(n)


def intersection_area(a: Ellipse, b: Ellipse, n: int = N_VERTICES) -> float:
    """Area of the overlap of two ellipses (polygon approximation).

    Arguments are put in a canonical order first, so the result is
    bit-identical under swapping.
    """
    if _key(b) < _key(a):
        a, b = b, a
    return _intersection_ordered(a, b, n)
