"""Rendering tests against synthesized on-disk inputs.

The fixtures write the snapshot format by hand (payload bytes plus JSON
sidecar), which doubles as a check that the documented format is sufficient
to consume without the solver package.
"""

import csv
import json
import math
from pathlib import Path

import numpy as np
import pytest

from antfvm_plots import PlotInputError, PlotJob, read_snapshot_series, render


def write_fake_snapshot(directory: Path, step: int, time: float, values: np.ndarray,
                        dtheta: float | None = None) -> None:
    n_x, n_y, n_theta = values.shape
    payload = directory / f"snap_{step:06d}.f64"
    payload.write_bytes(values.astype("<f8").tobytes(order="C"))
    meta = {
        "version": "1",
        "byte_order": "little",
        "index_order": "i,j,k;k-fastest",
        "grid": {
            "n_x": n_x,
            "n_y": n_y,
            "n_theta": n_theta,
            "dx": 1.0 / n_x,
            "dy": 1.0 / n_y,
            "dtheta": dtheta if dtheta is not None else 2.0 * math.pi / n_theta,
            "dt": 0.01,
            "n_steps": 10,
        },
        "params": None,
        "time": time,
        "step": step,
    }
    payload.with_suffix(".meta.json").write_text(json.dumps(meta))


def fake_run(directory: Path, times=(0.0, 0.5, 1.0), shape=(16, 1, 8)) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(0)
    for step, time in enumerate(times):
        x = -0.5 + (np.arange(shape[0]) + 0.5) / shape[0]
        profile = 1.0 + time * np.cos(2 * np.pi * x)
        values = np.broadcast_to(
            profile[:, None, None] / (2 * math.pi), shape
        ).copy()
        values += 0.01 * rng.random(shape)
        write_fake_snapshot(directory, step, time, values)


def fake_error_table(directory: Path) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    with (directory / "errors.csv").open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["N", "h", "e_L2", "e_Linf"])
        for n in (16, 32, 64):
            writer.writerow([n, 1.0 / n, 2.0 / n, 3.0 / n])


@pytest.mark.parametrize("observable", ["rho", "p2"])
@pytest.mark.parametrize("kind", ["lines", "spacetime"])
def test_profile_kinds(tmp_path, kind, observable):
    fake_run(tmp_path / "run")
    out = tmp_path / f"{kind}_{observable}.png"
    written = render(PlotJob(tmp_path / "run", kind, observable, out))
    assert written == out
    assert out.stat().st_size > 0


def test_loglog_from_error_table(tmp_path):
    fake_error_table(tmp_path / "study")
    out = tmp_path / "convergence.png"
    render(PlotJob(tmp_path / "study", "loglog", "rho", out))
    assert out.stat().st_size > 0


def test_loglog_from_kernel_compare(tmp_path):
    d = tmp_path / "cmp"
    d.mkdir()
    with (d / "kernel_compare.csv").open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["lambda", "e_L2"])
        for lam, err in ((0.2, 0.5), (0.1, 0.3), (0.05, 0.1)):
            writer.writerow([lam, err])
    out = tmp_path / "compare.png"
    render(PlotJob(d, "loglog", "rho", out))
    assert out.stat().st_size > 0


def test_heatmap2d_all_observables(tmp_path):
    fake_run(tmp_path / "run3d", shape=(8, 8, 6), times=(0.0, 0.1))
    for observable in ("rho", "p2", "f-slice"):
        out = tmp_path / f"heat_{observable}.png"
        render(PlotJob(tmp_path / "run3d", "heatmap2d", observable, out))
        assert out.stat().st_size > 0


def test_empty_directory_rejected_without_output(tmp_path):
    empty = tmp_path / "empty"
    empty.mkdir()
    out = tmp_path / "nothing.png"
    with pytest.raises(PlotInputError):
        render(PlotJob(empty, "lines", "rho", out))
    assert not out.exists()


def test_mixed_grids_rejected(tmp_path):
    d = tmp_path / "mixed"
    d.mkdir()
    write_fake_snapshot(d, 0, 0.0, np.zeros((8, 1, 4)))
    write_fake_snapshot(d, 1, 0.1, np.zeros((16, 1, 4)))
    with pytest.raises(PlotInputError, match="mixed grids"):
        read_snapshot_series(d)


def test_truncated_payload_rejected(tmp_path):
    d = tmp_path / "bad"
    d.mkdir()
    write_fake_snapshot(d, 0, 0.0, np.ones((4, 1, 4)))
    payload = d / "snap_000000.f64"
    payload.write_bytes(payload.read_bytes()[:-8])
    with pytest.raises(PlotInputError, match="bytes"):
        read_snapshot_series(d)


def test_f_slice_rejected_for_profile_kinds(tmp_path):
    fake_run(tmp_path / "run")
    with pytest.raises(PlotInputError, match="f-slice"):
        render(PlotJob(tmp_path / "run", "lines", "f-slice", tmp_path / "x.png"))


def test_rendering_is_deterministic(tmp_path):
    fake_run(tmp_path / "run")
    a = tmp_path / "a.png"
    b = tmp_path / "b.png"
    render(PlotJob(tmp_path / "run", "lines", "rho", a))
    render(PlotJob(tmp_path / "run", "lines", "rho", b))
    assert a.read_bytes() == b.read_bytes()


def test_invalid_job_fields():
    with pytest.raises(ValueError):
        PlotJob(Path("."), "pie", "rho", Path("x.png"))
    with pytest.raises(ValueError):
        PlotJob(Path("."), "lines", "vorticity", Path("x.png"))


def test_cli_round_trip(tmp_path):
    from antfvm_plots.cli import main

    fake_run(tmp_path / "run")
    out = tmp_path / "cli.png"
    assert main(["--input", str(tmp_path / "run"), "--kind", "lines",
                 "--observable", "rho", "--output", str(out)]) == 0
    assert out.stat().st_size > 0
    assert main(["--input", str(tmp_path / "missing"), "--kind", "lines",
                 "--observable", "rho", "--output", str(out)]) == 2
