"""How the sensing strategy changes the steady state.

Three ways to turn toward the chemical: read its gradient underfoot (B0),
read it a distance lambda ahead (Blambda), or correct the local gradient
with the curvature (Btau).  Look-ahead sensing reshapes the angular
distribution: the cos(2 theta) moment flips sign, which is the signature
separating head-to-tail alignment from perpendicular alignment.  Shrinking
lambda = tau collapses the two nonlocal variants onto each other.
"""

from antfvm import (
    KernelKind,
    ModelParams,
    StepOptions,
    build_grid,
    kernel_difference,
    run_simulation,
    second_polarization,
    spatial_density,
    two_bump_field,
)

N = 64
grid = build_grid(N, 1, N, dt=1e-2, t_final=1.0)
f0 = two_bump_field(grid, center_offset=0.125, half_width=0.125)


def run(kernel):
    params = ModelParams(D_T=0.1, Pe=2.0, gamma=500.0, alpha=1.0, kernel=kernel)
    return run_simulation(f0, params, StepOptions()).final_f


print("steady states at T = 1 from the same plateau initial data:\n")
finals = {}
for kernel in (KernelKind("B0"), KernelKind("Blambda", 0.1), KernelKind("Btau", 0.1)):
    final = run(kernel)
    finals[(kernel.tag, kernel.reach)] = final
    rho = spatial_density(final)
    p2 = second_polarization(final)
    peak_idx = int(rho.values.argmax())
    print(
        f"  {kernel.tag:8s} reach={kernel.reach:<5g} rho peak {rho.values.max():7.3f}"
        f"   p2 at peak {p2.values[peak_idx, 0]:+7.4f}"
    )

print("\nthe look-ahead kernel concentrates harder and flips the sign of the")
print("second angular moment at the aggregate, even though the densities look alike\n")

print("distance between look-ahead and curvature solutions as the reach shrinks:")
for reach in (0.2, 0.1, 0.05):
    fl = finals.get(("Blambda", reach)) or run(KernelKind("Blambda", reach))
    ft = finals.get(("Btau", reach)) or run(KernelKind("Btau", reach))
    print(f"  lambda = tau = {reach:<5g} relative L2 difference {kernel_difference(fl, ft):.4f}")
print("\nhalving the reach roughly halves-to-quarters the gap: the curvature kernel")
print("is the short-reach limit of look-ahead sensing")
