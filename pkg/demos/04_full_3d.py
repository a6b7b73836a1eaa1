"""A fully three-dimensional run (both space directions plus angle).

A Gaussian blob of walkers with curvature sensing, on a coarse mesh so the
run finishes in seconds.  The printout tracks conservation and the spread of
the spatial density; the structure-preservation guarantees (exact mass,
nonnegativity) hold step by step no matter how coarse the mesh is.
"""

import numpy as np

from antfvm import (
    KernelKind,
    ModelParams,
    StepOptions,
    build_grid,
    cell_average_init,
    run_simulation,
    spatial_density,
)

grid = build_grid(n_x=24, n_y=24, n_theta=16, dt=1e-3, t_final=0.05)
params = ModelParams(D_T=1e-2, Pe=3.0, gamma=250.0, alpha=1.0, kernel=KernelKind("Btau", 0.5))


def blob(x, y, theta):
    return np.exp(-(x**2 + y**2) / (2 * 0.15**2)) + 0.0 * theta


f0 = cell_average_init(blob, grid, quadrature_order=3, normalize=True)
result = run_simulation(f0, params, StepOptions(stability_warnings=False))

print("  time    mass - 1      min f      max f")
for step in result.steps:
    if step.step % 10 == 0:
        print(
            f"  {step.time:5.3f}  {step.mass - 1.0:+.2e}  {step.min_f:9.2e}"
            f"  {step.linf:9.4f}"
        )

rho = spatial_density(result.final_f).values
i, j = np.unravel_index(rho.argmax(), rho.shape)
print(f"\ndensity peak {rho.max():.3f} at cell ({i}, {j}); "
      f"the blob drifts and sharpens under the angular coupling")
print(f"picard sweeps on the last step: {result.steps[-1].picard_iters}")
