# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # Uncertainty ellipses
#
# A radar measures range and azimuth. Range noise stays constant while azimuth
# noise grows with distance, so the position uncertainty is an ellipse
# stretched across the line of sight. Two radars looking from different
# angles produce ellipses whose overlap is much smaller than either one.

# %%
import math

import numpy as np

from radar_cbba.geometry import Ellipse, PolarNoise, azimuth, intersection_area, measurement_covariance

noise = PolarNoise(sigma_r=2.0, sigma_theta=0.01)
for theta in (0.0, math.pi / 4, math.pi / 2):
    print(f"theta={theta:.3f}\n{measurement_covariance(100.0, theta, noise)}")

# %% [markdown]
# Azimuth is measured clockwise from +x, so a target up and to the right of
# the radar gets a range axis pointing at it.

# %%
target = np.array([6000.0, 4000.0])
radars = {"west": np.array([0.0, 0.0]), "south": np.array([6000.0, -3000.0])}
noise = PolarNoise(1.0, 2e-4)
ellipses = {}
for name, pos in radars.items():
    dx, dy = target - pos
    k = measurement_covariance(math.hypot(dx, dy), azimuth(dx, dy), noise)
    ellipses[name] = Ellipse(tuple(target), k, scale=2.0)
    a, b, phi = ellipses[name].axes()
    print(f"{name:5s} semi-axes {a:6.2f} m x {b:5.2f} m, major axis at {math.degrees(phi):6.1f} deg, "
          f"area {ellipses[name].area:7.2f} m^2")

# %% [markdown]
# The overlap is computed on 64-vertex inscribed polygons and corrected for
# the area an inscribed polygon always loses.

# %%
overlap = intersection_area(ellipses["west"], ellipses["south"])
print(f"overlap {overlap:.2f} m^2 ({overlap / min(e.area for e in ellipses.values()):.1%} of the smaller ellipse)")

# %% [markdown]
# Sanity check against two unit circles one meter apart, where the lens area
# has a closed form.

# %%
a = Ellipse((0, 0), np.eye(2), 1.0)
b = Ellipse((1, 0), np.eye(2), 1.0)
exact = 2 * math.acos(0.5) - 0.5 * math.sqrt(3)
print(f"polygon {intersection_area(a, b):.5f}  exact {exact:.5f}")
