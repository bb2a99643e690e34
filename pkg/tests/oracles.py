"""Independent reference implementations used by the tests.

None of these import the code under test beyond plain data containers.
"""

from __future__ import annotations

import math
import random

import numpy as np

from radar_cbba.oracle import ProblemInstance


def brute_force(instance: ProblemInstance, coupled: bool) -> float:
    """Best objective by enumerating every feasible per-target choice.

    Partial assignments that already exceed a budget are not extended; no
    other pruning is done, so every feasible assignment is visited.
    """
    per_target = []
    for j in instance.targets:
        choices = []
        for i in instance.radars:
            if (i, j) in instance.utilities_main:
                choices.append((instance.utilities_main[(i, j)], ((i, instance.costs[(i, j)]),)))
        if coupled:
            for i in instance.radars:
                for k in instance.radars:
                    if i != k and (i, k, j) in instance.utilities_pair:
                        charges = ((i, instance.costs[(i, j)]), (k, instance.costs[(k, j)]))
                        choices.append((instance.utilities_pair[(i, k, j)], charges))
        per_target.append(choices)
    used = dict.fromkeys(instance.radars, 0.0)
    best = 0.0

    def visit(d, values):
        nonlocal best
        if d == len(per_target):
            best = max(best, math.fsum(values))
            return
        visit(d + 1, values)
        for value, charges in per_target[d]:
            saved = dict(used)
            for r, c in charges:
                used[r] += c
            if all(used[r] <= instance.budgets[r] + 1e-9 for r, _ in charges):
                visit(d + 1, values + [value])
            used.update(saved)

    visit(0, [])
    return best


def random_instance(rng: random.Random, n_radars: int, n_targets: int, budget: float = 2.0,
                    pair_bonus: float = 5.0) -> ProblemInstance:
    radars = list(range(n_radars))
    targets = list(range(n_targets))
    main = {(i, j): round(rng.uniform(1, 100), 3) for i in radars for j in targets if rng.random() < 0.8}
    costs = {(i, j): 1.0 for i in radars for j in targets}
    pairs = {}
    for (i, j), c in main.items():
        for k in radars:
            if k != i and rng.random() < 0.7:
                pairs[(i, k, j)] = c + rng.uniform(0, pair_bonus)
    return ProblemInstance(radars, dict.fromkeys(radars, float(budget)), targets, main, pairs, costs)


def lens_area(r1: float, r2: float, d: float) -> float:
    """Closed-form area of the intersection of two discs."""
    if d >= r1 + r2:
        return 0.0
    if d <= abs(r1 - r2):
        return math.pi * min(r1, r2) ** 2
    a = r1 * r1 * math.acos((d * d + r1 * r1 - r2 * r2) / (2 * d * r1))
    b = r2 * r2 * math.acos((d * d + r2 * r2 - r1 * r1) / (2 * d * r2))
    c = 0.5 * math.sqrt((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2))
    return a + b - c


def monte_carlo_intersection(c1, m1, c2, m2, scale, n: int, rng: np.random.Generator) -> float:
    """Rejection sampling of the intersection inside the overlap of bounding boxes."""
    def box(c, m):
        hx = scale * math.sqrt(m[0, 0])
        hy = scale * math.sqrt(m[1, 1])
        return c[0] - hx, c[0] + hx, c[1] - hy, c[1] + hy

    b1, b2 = box(c1, m1), box(c2, m2)
    x0, x1 = max(b1[0], b2[0]), min(b1[1], b2[1])
    y0, y1 = max(b1[2], b2[2]), min(b1[3], b2[3])
    if x0 >= x1 or y0 >= y1:
        return 0.0
    pts = np.column_stack([rng.uniform(x0, x1, n), rng.uniform(y0, y1, n)])

    def inside(c, m):
        d = pts - np.asarray(c)
        q = np.einsum("ni,ij,nj->n", d, np.linalg.inv(m), d)
        return q <= scale * scale

    hits = np.count_nonzero(inside(c1, m1) & inside(c2, m2))
    return hits / n * (x1 - x0) * (y1 - y0)


def kalman_reference(x, p, z, r):
    """Textbook covariance-form update with position-only observation."""
    h = np.zeros((2, 4))
    h[0, 0] = h[1, 1] = 1.0
    s = h @ p @ h.T + r
    k = p @ h.T @ np.linalg.inv(s)
    x2 = x + k @ (np.asarray(z) - h @ x)
    p2 = (np.eye(4) - k @ h) @ p
    return x2, p2
