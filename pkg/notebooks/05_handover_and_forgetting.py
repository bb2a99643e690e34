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
# # Moving targets: handover and forgetting
#
# One target flies from radar 0 towards radar 1; another flies out of every
# radar's range. Ownership of the first moves across when radar 0 can no
# longer see it, and all knowledge of the second disappears a few steps after
# the last report.

# %%
import tempfile
from pathlib import Path

from radar_cbba.sim import RadarSpec, Scenario, TargetSpec, run
from radar_cbba.tracking import RadarParams

scenario = Scenario(
    seed=3, steps=420, dt=1.0,
    radars=(RadarSpec(0, RadarParams((0.0, 0.0))), RadarSpec(1, RadarParams((20_000.0, 0.0)))),
    comm_edges=((0, 1),),
    targets=(TargetSpec(0, (1000.0, 500.0), (50.0, 0.0)), TargetSpec(1, (0.0, 9000.0), (0.0, 50.0))),
)
out = Path(tempfile.mkdtemp())
result = run(scenario, history=True, snapshot_every=100, out_dir=out)

# %%
previous = None
for rec in result.history:
    holders = [rid for rid, bundle in rec.main_bundles.items() if 0 in bundle]
    if holders != previous:
        print(f"t={rec.t:3d} target 0 main radar: {holders or 'none'}")
        previous = holders

# %%
known = [rec.t for rec in result.history if any(1 in k for k in rec.known.values())]
print(f"target 1 last known at step {max(known)}; forgetting delay {scenario.stale_after} steps")

# %%
result.write_metrics(out / "metrics.csv")
print("snapshots:", sorted(p.name for p in out.glob("*.svg")))
print((out / "metrics.csv").read_text().splitlines()[:3])
