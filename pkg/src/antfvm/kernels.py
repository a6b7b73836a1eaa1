"""Angular drift kernels: how the walker turns in response to the chemical.

All three sensing variants produce face values B[i, j, k] at the angular face
k+1/2 above cell k:

* ``B0``      -- gradient sensed at the walker's own position,
* ``Blambda`` -- gradient sensed a distance lambda ahead of the walker
                 (nearest-neighbour lookup on the mesh),
* ``Btau``    -- gradient at the walker plus a curvature (second-difference)
                 correction of strength tau.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grid import DensityField, GridSpec, SpatialField, centered_gradient, discrete_hessian

logger = logging.getLogger(__name__)

KERNEL_TAGS = ("B0", "Blambda", "Btau")


@dataclass(frozen=True)
class KernelKind:
    """Sensing variant plus its reach parameter (lambda or tau; unused for B0)."""

    tag: str
    reach: float = 0.0

    def __post_init__(self):
        if self.tag not in KERNEL_TAGS:
            raise ValueError(f"unknown kernel tag {self.tag!r}; expected one of {KERNEL_TAGS}")
        if self.reach < 0:
            raise ValueError(f"kernel reach must be nonnegative, got {self.reach}")


def local_gradient_kernel() -> KernelKind:
    return KernelKind("B0")


def look_ahead_kernel(lam: float) -> KernelKind:
    return KernelKind("Blambda", lam)


def curvature_kernel(tau: float) -> KernelKind:
    return KernelKind("Btau", tau)


@dataclass(frozen=True)
class KernelValues:
    """Kernel samples at angular faces, indexed like a density field."""

    grid: GridSpec
    values: np.ndarray


@dataclass(frozen=True)
class ShiftTable:
    """Integer cell offsets of the look-ahead point, one pair per angular face.

    Offset s_x(k) is the unique integer with lambda*cos(theta_{k+1/2}) in
    [(s_x - 1/2) dx, (s_x + 1/2) dx); analogously for s_y with sin and dy.
    The half-open convention matches the half-open cells, so a point landing
    exactly on a face belongs to the right cell.
    """

    grid: GridSpec
    lam: float
    s_x: np.ndarray
    s_y: np.ndarray


def build_shift_table(lam: float, grid: GridSpec) -> ShiftTable:
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    faces = grid.theta_faces
    s_x = np.floor(lam * np.cos(faces) / grid.dx + 0.5).astype(np.int64)
    s_y = np.floor(lam * np.sin(faces) / grid.dy + 0.5).astype(np.int64)

    # The scheme's accuracy constants assume successive faces look into cells
    # at most ~2*pi*lam*dtheta/dx apart; log (never fail) when a coarse
    # angular mesh breaks that.
    span_x = int(np.max(np.abs(s_x - np.roll(s_x, 1) - 1)))
    span_y = int(np.max(np.abs(s_y - np.roll(s_y, 1) - 1)))
    bound_x = max(2.0 * math.pi * lam * grid.dtheta / grid.dx, 1.0)
    bound_y = max(2.0 * math.pi * lam * grid.dtheta / grid.dy, 1.0)
    if span_x > bound_x or span_y > bound_y:
        logger.info(
            "look-ahead shift span (%d, %d) exceeds the mesh-ratio bound (%.2f, %.2f)",
            span_x, span_y, bound_x, bound_y,
        )
    return ShiftTable(grid, lam, s_x, s_y)


@lru_cache(maxsize=128)
def _cached_shift_table(lam: float, grid: GridSpec) -> ShiftTable:
    return build_shift_table(lam, grid)


def eval_B0(c: SpatialField) -> KernelValues:
    """Local-gradient sensing: B = -sin(theta_f) * Dx c + cos(theta_f) * Dy c."""
    grid = c.grid
    gx, gy = centered_gradient(c)
    faces = grid.theta_faces
    vals = (
        (-np.sin(faces))[None, None, :] * gx.values[:, :, None]
        + np.cos(faces)[None, None, :] * gy.values[:, :, None]
    )
    return KernelValues(grid, vals)


def eval_Blambda(c: SpatialField, lam: float) -> KernelValues:
    """Look-ahead sensing: the centered gradient gathered at the shifted cell."""
    grid = c.grid
    table = _cached_shift_table(float(lam), grid)
    gx, gy = centered_gradient(c)
    faces = grid.theta_faces
    vals = np.empty(grid.shape)
    for k in range(grid.n_theta):
        sx = int(table.s_x[k])
        sy = int(table.s_y[k])
        gxs = np.roll(gx.values, (-sx, -sy), axis=(0, 1))
        gys = np.roll(gy.values, (-sx, -sy), axis=(0, 1))
        vals[:, :, k] = (-np.sin(faces[k])) * gxs + np.cos(faces[k]) * gys
    return KernelValues(grid, vals)


def eval_Btau(c: SpatialField, tau: float) -> KernelValues:
    """Gradient sensing plus a curvature correction from the second differences.

    The correction contracts the discrete Hessian between the turning normal
    and the heading direction:
        n . (H e) = sin(t)cos(t) * (dyy - dxx) + cos(2t) * dxy.
    """
    if tau < 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    grid = c.grid
    base = eval_B0(c).values
    dxx, dxy, _, dyy = discrete_hessian(c)
    faces = grid.theta_faces
    angular = np.sin(faces) * np.cos(faces)
    cross = np.cos(2.0 * faces)
    vals = base + tau * (
        angular[None, None, :] * (dyy.values - dxx.values)[:, :, None]
        + cross[None, None, :] * dxy.values[:, :, None]
    )
    return KernelValues(grid, vals)


def eval_kernel(c: SpatialField, kind: KernelKind) -> KernelValues:
    """Dispatch on the sensing variant."""
    if kind.tag == "B0":
        return eval_B0(c)
    if kind.tag == "Blambda":
        return eval_Blambda(c, kind.reach)
    return eval_Btau(c, kind.reach)


def dtheta_B(B: KernelValues) -> DensityField:
    """Angular difference of the face kernel back onto cell centers."""
    grid = B.grid
    vals = (B.values - np.roll(B.values, 1, axis=2)) / grid.dtheta
    return DensityField(grid, vals)
