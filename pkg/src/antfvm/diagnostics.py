"""Observables and experiment metrics computed from solver fields.

Everything here is a pure function of immutable fields.  The cross-mesh
comparison works by injecting the coarse piecewise-constant solution onto the
fine mesh, which represents it exactly and adds no projection error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .errors import ConfigurationError
from .grid import DensityField, GridSpec, SpatialField, lp_norm, sup_norm

if TYPE_CHECKING:
    from .cli import RunConfig

Norm = str  # "L1", "L2", ..., "Linf"


def _norm(field, norm: Norm) -> float:
    if norm == "Linf":
        return sup_norm(field)
    if norm.startswith("L"):
        return lp_norm(field, float(norm[1:]))
    raise ValueError(f"unknown norm {norm!r}; use 'Lp' (p >= 1) or 'Linf'")


@dataclass(frozen=True)
class ObservableSeries:
    """One scalar metric sampled along a run."""

    times: np.ndarray
    values: np.ndarray
    label: str

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.shape != v.shape:
            raise ValueError("times and values must have equal length")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)


def spatial_density(f: DensityField) -> SpatialField:
    """Integrate the angle out: rho[i, j] = sum_k f[i, j, k] * dtheta."""
    return SpatialField(f.grid, f.values.sum(axis=2) * f.grid.dtheta)


def polarization(f: DensityField) -> tuple[SpatialField, SpatialField]:
    """First angular moment (mean heading), midpoint quadrature at cell centers."""
    th = f.grid.theta_centers
    px = (f.values * np.cos(th)[None, None, :]).sum(axis=2) * f.grid.dtheta
    py = (f.values * np.sin(th)[None, None, :]).sum(axis=2) * f.grid.dtheta
    return SpatialField(f.grid, px), SpatialField(f.grid, py)


def second_polarization(f: DensityField) -> SpatialField:
    """cos(2 theta) moment; separates head-to-tail lanes from isotropic spots."""
    th = f.grid.theta_centers
    p2 = (f.values * np.cos(2.0 * th)[None, None, :]).sum(axis=2) * f.grid.dtheta
    return SpatialField(f.grid, p2)


def steady_state_metric(
    f_next: DensityField, f_prev: DensityField, dt: float, norm: Norm = "L2"
) -> float:
    """Norm of the discrete time derivative, ||f_next - f_prev|| / dt."""
    diff = DensityField(f_next.grid, f_next.values - f_prev.values)
    return _norm(diff, norm) / dt


def inject_to_fine(f_coarse: DensityField, fine_grid: GridSpec) -> DensityField:
    """Copy each coarse cell value into all fine cells it contains.

    This is the exact piecewise-constant representation of the coarse field
    on the fine mesh; every L^p norm and the total mass are preserved.
    """
    cg = f_coarse.grid
    factors = []
    for name, n_c, n_f in (
        ("x", cg.n_x, fine_grid.n_x),
        ("y", cg.n_y, fine_grid.n_y),
        ("theta", cg.n_theta, fine_grid.n_theta),
    ):
        if n_f % n_c != 0:
            raise ConfigurationError(
                f"fine {name}-count {n_f} is not a multiple of coarse count {n_c}"
            )
        factors.append(n_f // n_c)
    vals = f_coarse.values
    for axis, r in enumerate(factors):
        if r > 1:
            vals = np.repeat(vals, r, axis=axis)
    return DensityField(fine_grid, vals)


def relative_error(f_h: DensityField, f_ref: DensityField, norm: Norm = "L2") -> float:
    """||inject(f_h) - f_ref|| / ||f_ref|| on the reference mesh."""
    f_on_ref = inject_to_fine(f_h, f_ref.grid)
    diff = DensityField(f_ref.grid, f_on_ref.values - f_ref.values)
    return _norm(diff, norm) / _norm(f_ref, norm)


def kernel_difference(f_a: DensityField, f_b: DensityField, norm: Norm = "L2") -> float:
    """Relative difference of two same-grid solutions, ||f_a - f_b|| / ||f_a||."""
    if f_a.grid != f_b.grid:
        raise ConfigurationError("kernel_difference requires identical grids")
    diff = DensityField(f_a.grid, f_a.values - f_b.values)
    return _norm(diff, norm) / _norm(f_a, norm)


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    h: float
    error: float


@dataclass(frozen=True)
class ConvergenceTable:
    norm: Norm
    rows: tuple[ConvergenceRow, ...]
    slope: float | None  # None when degenerate (some error vanished)

    def __str__(self) -> str:
        lines = [f"# relative error vs reference, norm={self.norm}"]
        lines += [f"N={r.n:<5d} h={r.h:<12.6g} e={r.error:.6e}" for r in self.rows]
        lines.append(
            "slope=degenerate" if self.slope is None else f"slope={self.slope:.4f}"
        )
        return "\n".join(lines)


# Relative errors at or below this level are indistinguishable from solver
# round-off; a slope fitted through them would be noise.
DEGENERATE_ERROR_FLOOR = 1e-13


def fit_slope(hs: Sequence[float], errors: Sequence[float]) -> float | None:
    """Least-squares slope of log(e) against log(h).

    Returns None (degenerate) when fewer than two points are given or any
    error sits at round-off level.
    """
    if len(hs) < 2 or any(e <= DEGENERATE_ERROR_FLOOR for e in errors):
        return None
    coeffs = np.polyfit(np.log(np.asarray(hs)), np.log(np.asarray(errors)), 1)
    return float(coeffs[0])


def run_mesh_family(config: "RunConfig", n_values: Sequence[int]) -> dict[int, DensityField]:
    """Run the configured experiment once per mesh count, returning final fields.

    Each N replaces both the x- and theta-counts (n_x = n_theta = N, as in
    the y-invariant studies); the time step and final time are shared.  A
    failing run aborts the family with the completed finals attached.
    """
    from .cli import materialize  # deferred: cli orchestrates, we only compute
    from .errors import SimulationError, StudyError
    from .stepper import run_simulation

    finals: dict[int, DensityField] = {}
    for n in n_values:
        grid, params, f0, opts, _ = materialize(config, n_override=int(n))
        try:
            result = run_simulation(f0, params, opts)
        except SimulationError as exc:
            raise StudyError(
                f"mesh N={n} failed after {len(finals)} completed runs: {exc}",
                completed=finals,
                cause=exc,
            ) from exc
        finals[int(n)] = result.final_f
    return finals


def convergence_study(
    config: "RunConfig",
    n_list: Sequence[int],
    n_ref: int,
    norm: Norm = "L2",
) -> ConvergenceTable:
    """Run the configured experiment on a family of meshes and fit the order.

    Each N in ``n_list`` must divide ``n_ref``; the comparison injects each
    coarse final state onto the reference mesh.
    """
    for n in n_list:
        if n_ref % n != 0:
            raise ConfigurationError(f"mesh N={n} does not divide reference N={n_ref}")

    finals = run_mesh_family(config, [*n_list, n_ref])
    rows = tuple(
        ConvergenceRow(n=int(n), h=1.0 / n, error=relative_error(finals[n], finals[n_ref], norm))
        for n in n_list
    )
    slope = fit_slope([r.h for r in rows], [r.error for r in rows])
    return ConvergenceTable(norm=norm, rows=rows, slope=slope)


def metric_series(steps, label: str) -> ObservableSeries:
    """Extract one diagnostic column from a run's per-step records."""
    times = np.array([s.time for s in steps])
    values = np.array([getattr(s, label) for s in steps])
    return ObservableSeries(times=times, values=values, label=label)
