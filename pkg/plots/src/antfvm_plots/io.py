"""Readers for the solver's on-disk formats.

This package deliberately reimplements the format instead of importing the
solver: a snapshot is a raw little-endian float64 payload in (i, j, k; k
fastest) order next to a ``<basename>.meta.json`` sidecar with version "1".
Study CSVs carry a header row and '.' decimal separators.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SNAPSHOT_VERSION = "1"


class PlotInputError(RuntimeError):
    """Missing, corrupt, or mutually inconsistent input files."""


@dataclass(frozen=True)
class Snapshot:
    values: np.ndarray  # shape (n_x, n_y, n_theta)
    dx: float
    dy: float
    dtheta: float
    time: float
    step: int
    meta: dict

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.values.shape


def read_snapshot(path: str | Path) -> Snapshot:
    path = Path(path)
    side = path.with_suffix(".meta.json")
    try:
        doc = json.loads(side.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise PlotInputError(f"cannot read metadata {side}: {exc}") from exc
    if doc.get("version") != SNAPSHOT_VERSION:
        raise PlotInputError(f"unsupported snapshot version {doc.get('version')!r}")
    if doc.get("byte_order") != "little":
        raise PlotInputError(f"unsupported byte order {doc.get('byte_order')!r}")
    try:
        grid = doc["grid"]
        shape = (int(grid["n_x"]), int(grid["n_y"]), int(grid["n_theta"]))
        spacing = (float(grid["dx"]), float(grid["dy"]), float(grid["dtheta"]))
        time = float(doc["time"])
        step = int(doc["step"])
    except (KeyError, TypeError, ValueError) as exc:
        raise PlotInputError(f"corrupt metadata {side}: {exc}") from exc

    payload = path.read_bytes()
    expected = shape[0] * shape[1] * shape[2] * 8
    if len(payload) != expected:
        raise PlotInputError(
            f"{path}: payload is {len(payload)} bytes, grid needs {expected}"
        )
    values = np.frombuffer(payload, dtype="<f8").reshape(shape)
    return Snapshot(
        values=values,
        dx=spacing[0],
        dy=spacing[1],
        dtheta=spacing[2],
        time=time,
        step=step,
        meta=doc,
    )


def read_snapshot_series(directory: str | Path) -> list[Snapshot]:
    """All snapshots in a directory, sorted by time; grids must agree."""
    directory = Path(directory)
    paths = sorted(directory.glob("*.f64"))
    if not paths:
        raise PlotInputError(f"no snapshot payloads (*.f64) in {directory}")
    snaps = [read_snapshot(p) for p in paths]
    first = snaps[0]
    for snap in snaps[1:]:
        if snap.shape != first.shape or (snap.dx, snap.dy, snap.dtheta) != (
            first.dx,
            first.dy,
            first.dtheta,
        ):
            raise PlotInputError(
                f"mixed grids in {directory}: {snap.shape} vs {first.shape}"
            )
    return sorted(snaps, key=lambda s: s.time)


def read_error_table(directory: str | Path) -> tuple[str, np.ndarray, dict[str, np.ndarray]]:
    """Load a study CSV: returns (x label, x values, {column: values}).

    Looks for ``errors.csv`` (mesh study, x = h) or ``kernel_compare.csv``
    (x = lambda), in that order.
    """
    directory = Path(directory)
    for name, x_col in (("errors.csv", "h"), ("kernel_compare.csv", "lambda")):
        path = directory / name
        if path.exists():
            with path.open(newline="", encoding="utf-8") as handle:
                rows = list(csv.DictReader(handle))
            if not rows or x_col not in rows[0]:
                raise PlotInputError(f"{path}: missing rows or {x_col!r} column")
            xs = np.array([float(r[x_col]) for r in rows])
            columns = {
                key: np.array([float(r[key]) for r in rows])
                for key in rows[0]
                if key.startswith("e_")
            }
            if not columns:
                raise PlotInputError(f"{path}: no error columns (e_*)")
            return x_col, xs, columns
    raise PlotInputError(f"no errors.csv or kernel_compare.csv in {directory}")
