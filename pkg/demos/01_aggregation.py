"""Aggregation from indicator initial data.

A flat plateau of walkers on the periodic strip contracts into a single
stationary spot: the chemical field they deposit pulls headings toward the
density maximum faster than diffusion can spread it.  The run uses the
local-gradient sensing kernel and the y-invariant mesh.
"""

from pathlib import Path

from antfvm import (
    ModelParams,
    SnapshotMeta,
    StepOptions,
    build_grid,
    local_gradient_kernel,
    run_simulation,
    spatial_density,
    two_bump_field,
    write_snapshot,
)

OUT = Path(__file__).resolve().parent / "output" / "aggregation"

grid = build_grid(n_x=64, n_y=1, n_theta=64, dt=1e-2, t_final=1.0)
params = ModelParams(D_T=0.1, Pe=2.0, gamma=500.0, alpha=1.0, kernel=local_gradient_kernel())
f0 = two_bump_field(grid, center_offset=0.125, half_width=0.125)

print("plateau initial data: height %.4f, mass %.12f" % (f0.values.max(), f0.mass))
result = run_simulation(f0, params, StepOptions(), snapshot_times=(0.0, 0.1, 0.5, 1.0))

print("\n  time     max f     min f   |df/dt|_L2   sweeps")
for step in result.steps:
    if step.step in (0, 10, 20, 50, 100):
        print(
            f"  {step.time:4.2f}  {step.linf:8.4f}  {step.min_f:8.2e}"
            f"  {step.steady_l2:11.3e}  {step.picard_iters:5d}"
        )

rho_final = spatial_density(result.final_f)
print("\nfinal spatial density: peak %.4f at x index %d" % (
    rho_final.values.max(), rho_final.values.argmax()))
print("the time-derivative norm fell to %.2e: the spot is (numerically) stationary"
      % result.steps[-1].steady_l2)

OUT.mkdir(parents=True, exist_ok=True)
for time, f in result.snapshots:
    step = round(time / grid.dt)
    write_snapshot(f, SnapshotMeta(grid, params, time, step), OUT / f"snap_{step:06d}.f64")
print(f"\nsnapshots written to {OUT}")
