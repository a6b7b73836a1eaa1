"""Backward (implicit) finite-volume time step and simulation driver.

Each step solves the fully coupled nonlinear system

    f_next = f_prev + dt * operator(f_next, B[c_next]),
    c_next = chemical field of the angular integral of f_next,

by a fixed-point (Picard) sweep on the chemical coupling: freeze the kernel,
solve the linear implicit system, recompute the chemical from the new
iterate, repeat until the L1 increment drops below tolerance.  For a frozen
kernel the implicit matrix has the M-matrix sign pattern of implicit
upwinding (positive diagonal, nonpositive off-diagonals, unit column sums),
which is what guarantees conservation and nonnegativity of every solve.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sparse
import scipy.sparse.linalg as spla

from .chemo import EllipticOptions, solve_chemical
from .diagnostics import spatial_density, steady_state_metric
from .errors import (
    LinearSolveError,
    PicardConvergenceError,
    SimulationError,
    StepInvariantError,
)
from .grid import DensityField, DualField, GridSpec, SpatialField, lp_norm, sup_norm
from .kernels import KernelKind, KernelValues, eval_kernel

# Structure-preservation tolerances enforced on every accepted step.
MASS_DRIFT_TOL = 1e-10
NEGATIVITY_TOL = -1e-12


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters: diffusion, self-propulsion, coupling, decay, sensing."""

    D_T: float
    Pe: float
    gamma: float
    alpha: float
    kernel: KernelKind

    def __post_init__(self):
        if not self.D_T > 0:
            raise ValueError(f"D_T must be strictly positive, got {self.D_T}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be strictly positive, got {self.alpha}")
        if self.Pe < 0 or self.gamma < 0:
            raise ValueError("Pe and gamma must be nonnegative")


@dataclass(frozen=True)
class StepOptions:
    picard_tol: float = 1e-10  # L1 norm of the iterate increment
    picard_max_iters: int = 100
    linear_tol: float = 1e-10  # relative residual of each implicit solve
    elliptic: EllipticOptions = field(default_factory=EllipticOptions)
    stability_warnings: bool = True

    def __post_init__(self):
        if not (self.picard_tol > 0 and self.linear_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.picard_max_iters < 1:
            raise ValueError("picard_max_iters must be >= 1")


@dataclass(frozen=True)
class StepResult:
    f_next: DensityField
    c_next: SpatialField
    picard_iterations: int
    linear_residual: float
    mass_drift: float


def upwind_velocities(
    f: DensityField, B: KernelValues
) -> tuple[DualField, DualField, DualField]:
    """First-order upwind face velocities for the three drift directions.

    The spatial directions upwind on the cell-center heading angle; the
    angular direction upwinds on the face kernel value.
    """
    grid = f.grid
    v = f.values
    cos_c = np.cos(grid.theta_centers)[None, None, :]
    sin_c = np.sin(grid.theta_centers)[None, None, :]
    u = np.maximum(cos_c, 0.0) * v + np.minimum(cos_c, 0.0) * np.roll(v, -1, axis=0)
    w_y = np.maximum(sin_c, 0.0) * v + np.minimum(sin_c, 0.0) * np.roll(v, -1, axis=1)
    bv = B.values
    w_t = np.maximum(bv, 0.0) * v + np.minimum(bv, 0.0) * np.roll(v, -1, axis=2)
    return (
        DualField(grid, "x", u),
        DualField(grid, "y", w_y),
        DualField(grid, "theta", w_t),
    )


def apply_operator(f: DensityField, B: KernelValues, params: ModelParams) -> DensityField:
    """Negative divergence of the discrete fluxes (the implicit right-hand side).

    Linear in f for a frozen kernel.  The total over all cells telescopes to
    zero, which is the conservation property of the flux form.
    """
    grid = f.grid
    v = f.values
    u, w_y, w_t = upwind_velocities(f, B)

    flux_x = -(params.D_T * (np.roll(v, -1, axis=0) - v) / grid.dx - params.Pe * u.values)
    flux_y = -(params.D_T * (np.roll(v, -1, axis=1) - v) / grid.dy - params.Pe * w_y.values)
    flux_t = -((np.roll(v, -1, axis=2) - v) / grid.dtheta - params.gamma * w_t.values)

    div = (flux_x - np.roll(flux_x, 1, axis=0)) / grid.dx
    div += (flux_y - np.roll(flux_y, 1, axis=1)) / grid.dy
    div += (flux_t - np.roll(flux_t, 1, axis=2)) / grid.dtheta
    return DensityField(grid, -div)


class _ImplicitWorkspace:
    """Precomputed sparsity pattern and kernel-independent matrix entries.

    The implicit matrix I - dt*L splits into a part that depends only on
    (grid, D_T, Pe) and the angular-drift part that changes with the kernel
    each fixed-point iterate; only the latter's data vector is rebuilt.
    """

    def __init__(self, grid: GridSpec, d_t: float, pe: float):
        self.grid = grid
        n = grid.n_cells
        shape = grid.shape
        idx = np.arange(n).reshape(shape)
        diag = idx.ravel()
        x_up = np.roll(idx, -1, axis=0).ravel()
        x_dn = np.roll(idx, 1, axis=0).ravel()
        y_up = np.roll(idx, -1, axis=1).ravel()
        y_dn = np.roll(idx, 1, axis=1).ravel()
        t_up = np.roll(idx, -1, axis=2).ravel()
        t_dn = np.roll(idx, 1, axis=2).ravel()

        dt = grid.dt
        c_x = dt * d_t / grid.dx**2
        c_y = dt * d_t / grid.dy**2
        c_t = dt / grid.dtheta**2
        cos_c = np.broadcast_to(np.cos(grid.theta_centers), shape).ravel()
        sin_c = np.broadcast_to(np.sin(grid.theta_centers), shape).ravel()
        adv_x = dt * pe / grid.dx
        adv_y = dt * pe / grid.dy

        const_data = [
            1.0
            + 2.0 * (c_x + c_y + c_t)
            + adv_x * np.abs(cos_c)
            + adv_y * np.abs(sin_c),  # diagonal
            -c_x + adv_x * np.minimum(cos_c, 0.0),  # x neighbor up
            -c_x - adv_x * np.maximum(cos_c, 0.0),  # x neighbor down
            -c_y + adv_y * np.minimum(sin_c, 0.0),
            -c_y - adv_y * np.maximum(sin_c, 0.0),
            np.full(n, -c_t),  # theta diffusion, both neighbors
            np.full(n, -c_t),
        ]
        # Duplicate (row, col) pairs are summed on assembly, which makes the
        # degenerate single-cell directions (neighbor == self) come out right
        # with no special casing.
        self._rows = np.concatenate([diag] * 10)
        self._cols = np.concatenate(
            [diag, x_up, x_dn, y_up, y_dn, t_up, t_dn, diag, t_up, t_dn]
        )
        self._const_data = np.concatenate(
            [np.broadcast_to(d, (n,)) for d in const_data]
        )
        self._n = n
        self._dt_over_dtheta = dt / grid.dtheta

    def matrix(self, kernel_values: np.ndarray, gamma: float) -> sparse.csc_matrix:
        """Assemble I - dt*L for the given frozen angular kernel."""
        scale = self._dt_over_dtheta * gamma
        b_pos = np.maximum(kernel_values, 0.0)
        b_neg = np.minimum(kernel_values, 0.0)
        diag_t = scale * (b_pos - np.roll(b_neg, 1, axis=2))
        up_t = scale * b_neg
        dn_t = -scale * np.roll(b_pos, 1, axis=2)
        data = np.concatenate(
            [self._const_data, diag_t.ravel(), up_t.ravel(), dn_t.ravel()]
        )
        coo = sparse.coo_matrix(
            (data, (self._rows, self._cols)), shape=(self._n, self._n)
        )
        return coo.tocsc()


_WORKSPACES: dict[tuple, _ImplicitWorkspace] = {}


def _workspace(grid: GridSpec, params: ModelParams) -> _ImplicitWorkspace:
    key = (grid, params.D_T, params.Pe)
    ws = _WORKSPACES.get(key)
    if ws is None:
        ws = _ImplicitWorkspace(grid, params.D_T, params.Pe)
        _WORKSPACES[key] = ws
    return ws


def advance_step(
    f_prev: DensityField,
    params: ModelParams,
    opts: StepOptions | None = None,
) -> StepResult:
    """One backward step of the coupled system.

    With ``picard_max_iters=1`` the chemical coupling is lagged by one sweep
    instead of iterated to tolerance (useful for comparison runs); otherwise
    failure to reach ``picard_tol`` raises PicardConvergenceError.
    """
    if opts is None:
        opts = StepOptions()
    grid = f_prev.grid
    if float(f_prev.values.min()) < NEGATIVITY_TOL:
        raise ValueError("advance_step requires nonnegative input data")
    if (
        opts.stability_warnings
        and params.Pe > 0
        and grid.dt >= params.D_T / (2.0 * params.Pe**2)
    ):
        warnings.warn(
            f"dt = {grid.dt:g} is not below D_T/(2 Pe^2) = "
            f"{params.D_T / (2.0 * params.Pe**2):g}; the discrete stability "
            "estimates do not apply at this step size",
            stacklevel=2,
        )

    ws = _workspace(grid, params)
    b = f_prev.values.ravel()
    b_scale = max(float(np.linalg.norm(b)), np.finfo(float).tiny)
    f_m = f_prev.values
    lagged = opts.picard_max_iters == 1

    iterations = 0
    linear_residual = math.inf
    increment = math.inf
    for _ in range(opts.picard_max_iters):
        rho = spatial_density(DensityField(grid, f_m))
        c = solve_chemical(rho, params.alpha, opts.elliptic)
        kernel_vals = eval_kernel(c, params.kernel).values
        mat = ws.matrix(kernel_vals, params.gamma)
        # the stencil is structurally symmetric, which this ordering exploits
        x = spla.splu(mat, permc_spec="MMD_AT_PLUS_A").solve(b)
        iterations += 1

        linear_residual = float(np.linalg.norm(mat @ x - b)) / b_scale
        if linear_residual > opts.linear_tol:
            raise LinearSolveError(
                f"implicit solve residual {linear_residual:.3e} exceeds "
                f"{opts.linear_tol:.1e}",
                residual=linear_residual,
            )
        x = x.reshape(grid.shape)
        increment = float(np.abs(x - f_m).sum() * grid.cell_volume)
        f_m = x
        if increment <= opts.picard_tol:
            break
    else:
        if not lagged:
            raise PicardConvergenceError(
                f"fixed-point iteration stalled at increment {increment:.3e} "
                f"after {iterations} sweeps (tol {opts.picard_tol:.1e})",
                increment=increment,
                iterations=iterations,
            )

    f_next = DensityField(grid, f_m)
    c_next = solve_chemical(spatial_density(f_next), params.alpha, opts.elliptic)
    mass_drift = abs(f_next.mass - f_prev.mass)
    if mass_drift > MASS_DRIFT_TOL:
        raise StepInvariantError(f"mass drifted by {mass_drift:.3e} in one step")
    if float(f_next.values.min()) < NEGATIVITY_TOL:
        raise StepInvariantError(
            f"solution dipped to {float(f_next.values.min()):.3e} below zero"
        )
    return StepResult(
        f_next=f_next,
        c_next=c_next,
        picard_iterations=iterations,
        linear_residual=linear_residual,
        mass_drift=mass_drift,
    )


@dataclass(frozen=True)
class StepDiagnostics:
    step: int
    time: float
    mass: float
    min_f: float
    l2: float
    linf: float
    steady_l2: float
    steady_linf: float
    picard_iters: int


@dataclass(frozen=True)
class SimulationResult:
    grid: GridSpec
    params: ModelParams
    steps: tuple[StepDiagnostics, ...]
    snapshots: tuple[tuple[float, DensityField], ...]
    final_f: DensityField
    final_c: SpatialField | None


def _snapshot_steps(times: Sequence[float], grid: GridSpec) -> dict[int, float]:
    table: dict[int, float] = {}
    for t in times:
        step = round(t / grid.dt)
        if step < 0 or step > grid.n_steps:
            raise ValueError(f"snapshot time {t} outside the run [0, {grid.t_final}]")
        table[step] = t
    return table


def run_simulation(
    f0: DensityField,
    params: ModelParams,
    opts: StepOptions | None = None,
    snapshot_times: Sequence[float] = (),
) -> SimulationResult:
    """Advance n_steps backward steps, recording per-step scalar diagnostics.

    Snapshot times are matched to the nearest step.  A failing step raises
    SimulationError carrying the partial trajectory in ``partial``.
    """
    if opts is None:
        opts = StepOptions()
    grid = f0.grid
    wanted = _snapshot_steps(snapshot_times, grid)

    def _diag(step: int, f: DensityField, prev: DensityField | None, iters: int):
        return StepDiagnostics(
            step=step,
            time=step * grid.dt,
            mass=f.mass,
            min_f=float(f.values.min()),
            l2=lp_norm(f, 2),
            linf=sup_norm(f),
            steady_l2=steady_state_metric(f, prev, grid.dt, "L2") if prev else math.nan,
            steady_linf=steady_state_metric(f, prev, grid.dt, "Linf") if prev else math.nan,
            picard_iters=iters,
        )

    steps = [_diag(0, f0, None, 0)]
    snapshots = []
    if 0 in wanted:
        snapshots.append((0.0, f0))

    f = f0
    c_last: SpatialField | None = None
    for n in range(1, grid.n_steps + 1):
        try:
            result = advance_step(f, params, opts)
        except Exception as exc:
            partial = SimulationResult(
                grid=grid,
                params=params,
                steps=tuple(steps),
                snapshots=tuple(snapshots),
                final_f=f,
                final_c=c_last,
            )
            raise SimulationError(
                f"step {n} (t = {n * grid.dt:g}) failed: {exc}", partial=partial, cause=exc
            ) from exc
        steps.append(_diag(n, result.f_next, f, result.picard_iterations))
        f = result.f_next
        c_last = result.c_next
        if n in wanted:
            snapshots.append((n * grid.dt, f))

    return SimulationResult(
        grid=grid,
        params=params,
        steps=tuple(steps),
        snapshots=tuple(snapshots),
        final_f=f,
        final_c=c_last,
    )
