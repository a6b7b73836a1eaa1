"""Uniform periodic discretization of the unit torus cross the circle of angles.

The computational domain is [-1/2, 1/2)^2 x [0, 2pi) with periodic wrap in all
three directions.  Fields store cell averages on the primal mesh; discrete
derivatives live on the dual (face-centered) mesh.  Index order is (i, j, k)
with the angular index k varying fastest, which is the C-order layout of an
array of shape (n_x, n_y, n_theta).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Literal, Union

import numpy as np

from .errors import ConfigurationError

TWO_PI = 2.0 * math.pi

# Grids where dtheta/dx or dtheta/dy drops below this ratio are legal but get
# a warning: the angular mesh is then disproportionately fine relative to the
# spatial one and the upwind coupling degrades.
MIN_ANGLE_SPACE_RATIO = 0.1

Direction = Literal["x", "y", "theta"]
_AXIS = {"x": 0, "y": 1, "theta": 2}


@dataclass(frozen=True)
class GridSpec:
    """Cell counts, spacings, and time stepping of one discretization."""

    n_x: int
    n_y: int
    n_theta: int
    dx: float
    dy: float
    dtheta: float
    dt: float
    n_steps: int

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n_x, self.n_y, self.n_theta)

    @property
    def n_cells(self) -> int:
        return self.n_x * self.n_y * self.n_theta

    @property
    def cell_volume(self) -> float:
        """Measure of one cell, dx*dy*dtheta."""
        return self.dx * self.dy * self.dtheta

    @property
    def cell_area(self) -> float:
        """Spatial measure of one (i, j) column, dx*dy."""
        return self.dx * self.dy

    @property
    def t_final(self) -> float:
        return self.n_steps * self.dt

    @property
    def x_centers(self) -> np.ndarray:
        return -0.5 + (np.arange(self.n_x) + 0.5) * self.dx

    @property
    def y_centers(self) -> np.ndarray:
        return -0.5 + (np.arange(self.n_y) + 0.5) * self.dy

    @property
    def theta_centers(self) -> np.ndarray:
        return (np.arange(self.n_theta) + 0.5) * self.dtheta

    @property
    def theta_faces(self) -> np.ndarray:
        """Angle of the face above cell k, i.e. face index k+1/2."""
        return (np.arange(self.n_theta) + 1.0) * self.dtheta


def build_grid(n_x: int, n_y: int, n_theta: int, dt: float, t_final: float) -> GridSpec:
    """Construct a GridSpec, validating counts and the step count t_final/dt.

    t_final/dt must be an integer up to a few ulp; otherwise the requested
    final time is not reachable by whole steps and the call fails.
    """
    for name, count in (("n_x", n_x), ("n_y", n_y), ("n_theta", n_theta)):
        if int(count) != count or count < 1:
            raise ConfigurationError(f"{name} must be a positive integer, got {count!r}")
    if not dt > 0:
        raise ConfigurationError(f"dt must be positive, got {dt!r}")
    if t_final < 0:
        raise ConfigurationError(f"t_final must be nonnegative, got {t_final!r}")

    ratio = t_final / dt
    n_steps = round(ratio)
    if abs(ratio - n_steps) > 4.0 * math.ulp(max(abs(ratio), 1.0)):
        raise ConfigurationError(
            f"t_final/dt = {ratio!r} is not an integer number of steps"
        )

    grid = GridSpec(
        n_x=int(n_x),
        n_y=int(n_y),
        n_theta=int(n_theta),
        dx=1.0 / n_x,
        dy=1.0 / n_y,
        dtheta=TWO_PI / n_theta,
        dt=float(dt),
        n_steps=n_steps,
    )
    # Single-cell directions carry no differences, so their ratio is moot.
    ratios = {}
    if grid.n_x > 1:
        ratios["dtheta/dx"] = grid.dtheta / grid.dx
    if grid.n_y > 1:
        ratios["dtheta/dy"] = grid.dtheta / grid.dy
    bad = {k: v for k, v in ratios.items() if v < MIN_ANGLE_SPACE_RATIO}
    if bad:
        detail = ", ".join(f"{k} = {v:.3g}" for k, v in bad.items())
        warnings.warn(
            f"{detail}: the angular mesh is much finer than the spatial one; "
            "accuracy constants degrade",
            stacklevel=2,
        )
    return grid


def _as_finite_array(values, shape: tuple[int, ...], what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.shape != shape:
        raise ValueError(f"{what}: expected shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what}: values contain NaN or Inf")
    return arr


@dataclass(frozen=True)
class DensityField:
    """Cell averages of the kinetic density over all (i, j, k) cells."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "values", _as_finite_array(self.values, self.grid.shape, "DensityField")
        )

    @property
    def mass(self) -> float:
        return float(self.values.sum() * self.grid.cell_volume)


@dataclass(frozen=True)
class SpatialField:
    """Cell averages of a purely spatial quantity over all (i, j) cells."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        shape = (self.grid.n_x, self.grid.n_y)
        object.__setattr__(
            self, "values", _as_finite_array(self.values, shape, "SpatialField")
        )


@dataclass(frozen=True)
class DualField:
    """Face-centered values: entry index i holds the face between cells i and i+1.

    Periodicity makes the face count equal the cell count, so the array has
    the same shape as the parent field.
    """

    grid: GridSpec
    direction: Direction
    values: np.ndarray

    def __post_init__(self):
        if self.direction not in _AXIS:
            raise ValueError(f"unknown direction {self.direction!r}")
        if self.values.ndim == 2:
            shape: tuple[int, ...] = (self.grid.n_x, self.grid.n_y)
        else:
            shape = self.grid.shape
        object.__setattr__(
            self, "values", _as_finite_array(self.values, shape, "DualField")
        )


Field = Union[DensityField, SpatialField]
AnyField = Union[DensityField, SpatialField, DualField]


def _diff_values(values: np.ndarray, axis: int, spacing: float) -> np.ndarray:
    return (np.roll(values, -1, axis=axis) - values) / spacing


def ddx(field: Field) -> DualField:
    """Forward difference onto x-faces: (f[i+1] - f[i]) / dx, periodic."""
    return DualField(field.grid, "x", _diff_values(field.values, 0, field.grid.dx))


def ddy(field: Field) -> DualField:
    """Forward difference onto y-faces: (f[j+1] - f[j]) / dy, periodic."""
    return DualField(field.grid, "y", _diff_values(field.values, 1, field.grid.dy))


def ddtheta(field: DensityField) -> DualField:
    """Forward difference onto angular faces: (f[k+1] - f[k]) / dtheta, periodic."""
    if field.values.ndim != 3:
        raise ValueError("ddtheta requires a density-shaped field")
    return DualField(field.grid, "theta", _diff_values(field.values, 2, field.grid.dtheta))


def centered_gradient(c: SpatialField) -> tuple[SpatialField, SpatialField]:
    """Centered spatial gradient (c[i+1]-c[i-1])/(2 dx) per direction."""
    v = c.values
    gx = (np.roll(v, -1, axis=0) - np.roll(v, 1, axis=0)) / (2.0 * c.grid.dx)
    gy = (np.roll(v, -1, axis=1) - np.roll(v, 1, axis=1)) / (2.0 * c.grid.dy)
    return SpatialField(c.grid, gx), SpatialField(c.grid, gy)


def discrete_hessian(
    c: SpatialField,
) -> tuple[SpatialField, SpatialField, SpatialField, SpatialField]:
    """Second differences (xx, xy, yx, yy); the mixed entries are one shared field.

    The diagonal entries use the three-point stencil, the mixed entry the
    centered four-corner stencil over 4*dx*dy.
    """
    v = c.values
    g = c.grid
    dxx = (np.roll(v, -1, axis=0) - 2.0 * v + np.roll(v, 1, axis=0)) / g.dx**2
    dyy = (np.roll(v, -1, axis=1) - 2.0 * v + np.roll(v, 1, axis=1)) / g.dy**2
    dxy = (
        np.roll(v, (-1, -1), axis=(0, 1))
        - np.roll(v, (1, -1), axis=(0, 1))
        - np.roll(v, (-1, 1), axis=(0, 1))
        + np.roll(v, (1, 1), axis=(0, 1))
    ) / (4.0 * g.dx * g.dy)
    fxx = SpatialField(g, dxx)
    fxy = SpatialField(g, dxy)
    fyy = SpatialField(g, dyy)
    return fxx, fxy, fxy, fyy


def _measure(field: AnyField) -> float:
    if field.values.ndim == 3:
        return field.grid.cell_volume
    return field.grid.cell_area


def lp_norm(field: AnyField, p: float) -> float:
    """Discrete L^p norm, (sum |f|^p * cell measure)^(1/p)."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    return float((np.abs(field.values) ** p).sum() * _measure(field)) ** (1.0 / p)


def sup_norm(field: AnyField) -> float:
    """Discrete L^inf norm, max |f|."""
    return float(np.abs(field.values).max())


def sobolev_seminorm(field: Field, p: float) -> float:
    """First-order seminorm from the face differences in every direction.

    Density-shaped fields difference in x, y, and theta; spatial fields in x
    and y only.  A direction with a single cell contributes exactly zero.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    g = field.grid
    total = (np.abs(ddx(field).values) ** p).sum()
    total += (np.abs(ddy(field).values) ** p).sum()
    if field.values.ndim == 3:
        total += (np.abs(ddtheta(field).values) ** p).sum()
    return float(total * _measure(field)) ** (1.0 / p)


def _gauss_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature nodes/weights on [-1/2, 1/2]; order 1 is the midpoint rule."""
    if order < 1:
        raise ValueError(f"quadrature_order must be >= 1, got {order}")
    if order == 1:
        return np.array([0.0]), np.array([1.0])
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return nodes / 2.0, weights / 2.0


def cell_average_init(
    f0: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray],
    grid: GridSpec,
    quadrature_order: int = 1,
    normalize: bool = False,
) -> DensityField:
    """Cell-average a nonnegative pointwise initial condition.

    ``f0`` must accept broadcastable (x, y, theta) arrays.  The default is
    the midpoint rule; higher orders use a tensor Gauss rule per cell, which
    is what smooth data wants.  With ``normalize`` the result is rescaled to
    total mass one.
    """
    nodes, weights = _gauss_rule(quadrature_order)
    xc = grid.x_centers[:, None, None]
    yc = grid.y_centers[None, :, None]
    tc = grid.theta_centers[None, None, :]

    acc = np.zeros(grid.shape)
    for a, wa in zip(nodes, weights):
        for b, wb in zip(nodes, weights):
            for c, wc in zip(nodes, weights):
                samples = np.asarray(
                    f0(xc + a * grid.dx, yc + b * grid.dy, tc + c * grid.dtheta),
                    dtype=np.float64,
                )
                samples = np.broadcast_to(samples, grid.shape)
                if np.any(samples < 0):
                    raise ValueError("initial condition produced negative samples")
                acc += (wa * wb * wc) * samples

    if normalize:
        total = acc.sum() * grid.cell_volume
        if total <= 0:
            raise ValueError("cannot normalize an initial condition with zero mass")
        acc /= total
    return DensityField(grid, acc)
