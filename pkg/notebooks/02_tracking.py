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
# # Tracking one target
#
# Each radar runs a constant-velocity Kalman filter in global Cartesian
# coordinates. The prediction ellipse shrinks while measurements arrive and
# grows again when the radar stops looking.

# %%
import numpy as np

from radar_cbba.tracking import RadarParams, initiate, measure, predict, prediction_ellipse, update

radar = RadarParams(position=(0.0, 0.0))
truth = (3000.0, 4000.0)
rng = np.random.default_rng(0)

z, rm = measure(radar, truth, rng)
track = initiate(z, rm)
areas = []
for step in range(1, 31):
    track = predict(track, 1.0)
    areas.append(prediction_ellipse(track).area)
    z, rm = measure(radar, truth, rng)
    track = update(track, z, rm, step=step)
print("area while tracking:", " ".join(f"{a:.1f}" for a in areas[:10]), "...", f"{areas[-1]:.1f}")

# %% [markdown]
# Coasting: no measurements, so process noise inflates the ellipse each step.

# %%
coast = []
for _ in range(8):
    track = predict(track, 1.0)
    coast.append(prediction_ellipse(track).area)
print("area while coasting:", " ".join(f"{a:.1f}" for a in coast))

# %% [markdown]
# Lower signal-to-noise means larger measurement noise. Surveillance scans
# run at a quarter of the nominal S/N, which doubles both standard deviations.

# %%
_, nominal = measure(radar, truth, np.random.default_rng(1))
_, standby = measure(radar, truth, np.random.default_rng(1), snr=radar.standby_snr)
print("standby / nominal covariance ratio:", np.round(standby / nominal, 6)[0, 0])
