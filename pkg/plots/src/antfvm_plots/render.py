"""The four figure kinds rendered from snapshot and study files.

* ``lines``      -- one curve of the observable against x per snapshot time,
                    with the earliest time drawn in grey,
* ``spacetime``  -- time-versus-x heatmap of the observable,
* ``loglog``     -- study errors against mesh size (or sensing reach) with a
                    slope-one guide line,
* ``heatmap2d``  -- one x-y panel of the observable per snapshot time.

Observables: ``rho`` (angular integral), ``p2`` (cos(2 theta) moment), and
``f-slice`` (the x-theta slice at the first y-row; heatmap2d only).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import PlotInputError, Snapshot, read_error_table, read_snapshot_series

KINDS = ("lines", "spacetime", "loglog", "heatmap2d")
OBSERVABLES = ("rho", "p2", "f-slice")


@dataclass(frozen=True)
class PlotJob:
    input_dir: Path
    kind: str
    observable: str
    output: Path

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; expected {KINDS}")
        if self.observable not in OBSERVABLES:
            raise ValueError(
                f"unknown observable {self.observable!r}; expected {OBSERVABLES}"
            )


def _x_centers(snap: Snapshot) -> np.ndarray:
    n_x = snap.shape[0]
    return -0.5 + (np.arange(n_x) + 0.5) * snap.dx


def _y_centers(snap: Snapshot) -> np.ndarray:
    n_y = snap.shape[1]
    return -0.5 + (np.arange(n_y) + 0.5) * snap.dy


def _observable_xy(snap: Snapshot, observable: str) -> np.ndarray:
    """Reduce the angular direction: a (n_x, n_y) array."""
    theta = (np.arange(snap.shape[2]) + 0.5) * snap.dtheta
    if observable == "rho":
        return snap.values.sum(axis=2) * snap.dtheta
    if observable == "p2":
        return (snap.values * np.cos(2.0 * theta)[None, None, :]).sum(axis=2) * snap.dtheta
    raise PlotInputError(
        "the f-slice observable is two-dimensional; use the heatmap2d kind"
    )


def _observable_profile(snap: Snapshot, observable: str) -> np.ndarray:
    """Collapse to a profile over x (averaging any y-extent)."""
    return _observable_xy(snap, observable).mean(axis=1)


def _render_lines(snaps: list[Snapshot], observable: str, ax) -> None:
    x = _x_centers(snaps[0])
    first = snaps[0]
    ax.plot(
        x,
        _observable_profile(first, observable),
        color="0.6",
        label=f"t = {first.time:g} (initial)",
    )
    for snap in snaps[1:]:
        ax.plot(x, _observable_profile(snap, observable), label=f"t = {snap.time:g}")
    ax.set_xlabel("x")
    ax.set_ylabel(observable)
    ax.legend(fontsize="small")


def _render_spacetime(snaps: list[Snapshot], observable: str, ax, fig) -> None:
    if len(snaps) < 2:
        raise PlotInputError("a space-time map needs at least two snapshot times")
    x = _x_centers(snaps[0])
    times = np.array([s.time for s in snaps])
    field = np.stack([_observable_profile(s, observable) for s in snaps])
    mesh = ax.pcolormesh(x, times, field, shading="nearest")
    fig.colorbar(mesh, ax=ax, label=observable)
    ax.set_xlabel("x")
    ax.set_ylabel("t")


def _render_loglog(input_dir: Path, ax) -> None:
    x_label, xs, columns = read_error_table(input_dir)
    for name, values in sorted(columns.items()):
        ax.loglog(xs, values, marker="o", label=name)
    anchor = max(v[0] for v in columns.values())
    guide = anchor * xs / xs[0]
    ax.loglog(xs, guide, "k--", linewidth=0.8, label="slope 1")
    ax.set_xlabel(x_label)
    ax.set_ylabel("relative error")
    ax.legend(fontsize="small")


def _render_heatmap2d(snaps: list[Snapshot], observable: str, fig) -> None:
    axes = fig.subplots(1, len(snaps), squeeze=False)[0]
    for ax, snap in zip(axes, snaps):
        if observable == "f-slice":
            theta = (np.arange(snap.shape[2]) + 0.5) * snap.dtheta
            mesh = ax.pcolormesh(
                _x_centers(snap), theta, snap.values[:, 0, :].T, shading="nearest"
            )
            ax.set_ylabel("theta")
        else:
            mesh = ax.pcolormesh(
                _x_centers(snap),
                _y_centers(snap),
                _observable_xy(snap, observable).T,
                shading="nearest",
            )
            ax.set_ylabel("y")
        ax.set_xlabel("x")
        ax.set_title(f"t = {snap.time:g}")
        fig.colorbar(mesh, ax=ax)


def render(job: PlotJob) -> Path:
    """Render one figure; returns the written image path."""
    input_dir = Path(job.input_dir)
    if not input_dir.is_dir():
        raise PlotInputError(f"input directory {input_dir} does not exist")

    fig = plt.figure(figsize=(7, 4.5), dpi=120)
    try:
        if job.kind == "loglog":
            _render_loglog(input_dir, fig.add_subplot())
        else:
            snaps = read_snapshot_series(input_dir)
            if job.kind == "lines":
                _render_lines(snaps, job.observable, fig.add_subplot())
            elif job.kind == "spacetime":
                _render_spacetime(snaps, job.observable, fig.add_subplot(), fig)
            else:
                _render_heatmap2d(snaps, job.observable, fig)
        fig.tight_layout()
        output = Path(job.output)
        output.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(output)
    finally:
        plt.close(fig)
    return output
