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
# # The two-round auction step by step
#
# Three radars on a line and two targets, each target close to one end. The
# middle radar can talk to both neighbours but the end radars only hear
# each other through it. We print the main-round winners held by every radar
# after each step until they agree.

# %%
from radar_cbba.sim import RadarSpec, Scenario, TargetSpec, run
from radar_cbba.tracking import RadarParams

radars = tuple(RadarSpec(i, RadarParams((10_000.0 * i, 0.0))) for i in range(3))
targets = (TargetSpec(0, (1500.0, 800.0)), TargetSpec(1, (18_500.0, 800.0)))
scenario = Scenario(seed=2, steps=8, dt=1.0, radars=radars, comm_edges=((0, 1), (1, 2)),
                    targets=targets, freeze_utilities=True)
result = run(scenario, history=True, trace=True)

# %%
for rec in result.history:
    views = "  ".join(f"r{rid}: {dict(sorted(z.items()))}" for rid, z in rec.main_z.items())
    print(f"t={rec.t}  {views}")

# %% [markdown]
# Optional round: once a main winner is known, the other radars bid the
# pairing bonus for tracking the same target.

# %%
last = result.history[-1]
print("main bundles    ", last.main_bundles)
print("optional bundles", last.optional_bundles)
print("bids           ", {j: round(y, 3) for j, y in last.optional_y[0].items()})

# %% [markdown]
# Every message carries the sender's bids, winners and timestamps. Main
# messages also carry the winning ellipses, which optional bidders need.

# %%
first = result.trace[0].to_dict()
print({k: first[k] for k in ("sender", "send_time", "round", "z", "s")})
