"""Config parsing, experiment orchestration, and snapshot serialization.

Config files are flat sectioned key-value text::

    [grid]
    n_x = 64
    n_y = 1
    n_theta = 64
    dt = 1e-2
    t_final = 1.0

    [params]
    D_T = 0.1
    Pe = 2.0
    gamma = 500.0
    alpha = 1.0
    kernel = B0          # B0 | Blambda | Btau
    # lambda = 0.1       # required for Blambda
    # tau = 0.1          # required for Btau

    [initial]
    preset = two_bump    # uniform | two_bump | custom
    center_offset = 0.125
    half_width = 0.125

    [solver]             # optional, defaults shown in the README
    [output]
    directory = out
    snapshot_times = 0.0, 0.1, 1.0

Snapshots are raw little-endian float64 payloads in (i, j, k; k fastest)
order with a JSON metadata sidecar next to them (same basename, extension
``.meta.json``).  Diagnostics go to a CSV with one row per step.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .chemo import EllipticOptions
from .diagnostics import fit_slope, kernel_difference, relative_error, run_mesh_family
from .errors import ConfigurationError, SimulationError, SnapshotFormatError, StudyError
from .grid import (
    TWO_PI,
    DensityField,
    GridSpec,
    build_grid,
    cell_average_init,
)
from .kernels import KernelKind
from .stepper import ModelParams, SimulationResult, StepOptions, run_simulation

SNAPSHOT_VERSION = "1"

CSV_COLUMNS = (
    "step",
    "time",
    "mass",
    "min_f",
    "L2",
    "Linf",
    "steady_metric_L2",
    "steady_metric_Linf",
    "picard_iters",
)


# ---------------------------------------------------------------------------
# run configuration


@dataclass(frozen=True)
class InitialSpec:
    preset: str = "uniform"
    center_offset: float = 0.125
    half_width: float = 0.125
    expression: str | None = None
    quadrature_order: int = 3
    normalize: bool = True


@dataclass(frozen=True)
class OutputSpec:
    directory: str = "out"
    snapshot_times: tuple[float, ...] = ()
    formats: tuple[str, ...] = ("f64",)


@dataclass(frozen=True)
class RunConfig:
    n_x: int
    n_y: int
    n_theta: int
    dt: float
    t_final: float
    params: ModelParams
    initial: InitialSpec = field(default_factory=InitialSpec)
    solver: StepOptions = field(default_factory=StepOptions)
    output: OutputSpec = field(default_factory=OutputSpec)


def _parse_bool(raw: str) -> bool:
    low = raw.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {raw!r}")


def _parse_float_list(raw: str) -> tuple[float, ...]:
    if not raw.strip():
        return ()
    return tuple(float(part) for part in raw.split(","))


def _parse_str_list(raw: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in raw.split(",") if part.strip())


_SCHEMA = {
    "grid": {
        "n_x": int,
        "n_y": int,
        "n_theta": int,
        "dt": float,
        "t_final": float,
    },
    "params": {
        "D_T": float,
        "Pe": float,
        "gamma": float,
        "alpha": float,
        "kernel": str,
        "lambda": float,
        "tau": float,
    },
    "initial": {
        "preset": str,
        "center_offset": float,
        "half_width": float,
        "expression": str,
        "quadrature_order": int,
        "normalize": _parse_bool,
    },
    "solver": {
        "picard_tol": float,
        "picard_max_iters": int,
        "linear_tol": float,
        "elliptic_tol": float,
        "elliptic_method": str,
        "stability_warnings": _parse_bool,
    },
    "output": {
        "directory": str,
        "snapshot_times": _parse_float_list,
        "formats": _parse_str_list,
    },
}

_REQUIRED = {
    "grid": ("n_x", "n_y", "n_theta", "dt", "t_final"),
    "params": ("D_T", "Pe", "gamma", "alpha", "kernel"),
}


def _scan_sections(text: str) -> dict[str, dict[str, tuple[str, int]]]:
    """Split the document into sections; each key maps to (raw value, line)."""
    sections: dict[str, dict[str, tuple[str, int]]] = {}
    current: str | None = None
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current not in _SCHEMA:
                raise ConfigurationError(
                    f"line {lineno}: unknown section [{current}]"
                )
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            raise ConfigurationError(
                f"line {lineno}: expected 'key = value', got {raw_line.strip()!r}"
            )
        if current is None:
            raise ConfigurationError(
                f"line {lineno}: key outside any [section]"
            )
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _SCHEMA[current]:
            raise ConfigurationError(
                f"line {lineno}: unknown key {key!r} in section [{current}]"
            )
        if key in sections[current]:
            raise ConfigurationError(f"line {lineno}: duplicate key {key!r}")
        sections[current][key] = (value.strip(), lineno)
    return sections


def _convert(section: str, key: str, raw: str, lineno: int):
    try:
        return _SCHEMA[section][key](raw)
    except (ValueError, TypeError) as exc:
        raise ConfigurationError(
            f"line {lineno}: bad value for {key!r}: {exc}"
        ) from exc


def _require_positive(section, key, value, lineno, strict=True):
    if (strict and not value > 0) or (not strict and value < 0):
        bound = "positive" if strict else "nonnegative"
        raise ConfigurationError(f"line {lineno}: {key} must be {bound}, got {value}")


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate a run configuration document."""
    sections = _scan_sections(text)

    for section, required in _REQUIRED.items():
        if section not in sections:
            raise ConfigurationError(f"missing required section [{section}]")
        for key in required:
            if key not in sections[section]:
                raise ConfigurationError(
                    f"missing required key {key!r} in section [{section}]"
                )

    values: dict[str, dict] = {}
    lines: dict[str, dict[str, int]] = {}
    for section, entries in sections.items():
        values[section] = {}
        lines[section] = {}
        for key, (raw, lineno) in entries.items():
            values[section][key] = _convert(section, key, raw, lineno)
            lines[section][key] = lineno

    g = values["grid"]
    for key in ("n_x", "n_y", "n_theta", "dt", "t_final"):
        _require_positive("grid", key, g[key], lines["grid"][key])

    p = values["params"]
    _require_positive("params", "D_T", p["D_T"], lines["params"]["D_T"])
    _require_positive("params", "alpha", p["alpha"], lines["params"]["alpha"])
    _require_positive("params", "Pe", p["Pe"], lines["params"]["Pe"], strict=False)
    _require_positive("params", "gamma", p["gamma"], lines["params"]["gamma"], strict=False)

    tag = p["kernel"]
    kernel_line = lines["params"]["kernel"]
    if tag not in ("B0", "Blambda", "Btau"):
        raise ConfigurationError(
            f"line {kernel_line}: unknown kernel tag {tag!r} (use B0, Blambda, or Btau)"
        )
    if tag == "Blambda":
        if "lambda" not in p:
            raise ConfigurationError(f"line {kernel_line}: lambda required for kernel = Blambda")
        _require_positive("params", "lambda", p["lambda"], lines["params"]["lambda"], strict=False)
        kernel = KernelKind("Blambda", p["lambda"])
    elif tag == "Btau":
        if "tau" not in p:
            raise ConfigurationError(f"line {kernel_line}: tau required for kernel = Btau")
        _require_positive("params", "tau", p["tau"], lines["params"]["tau"], strict=False)
        kernel = KernelKind("Btau", p["tau"])
    else:
        kernel = KernelKind("B0")
    for key in ("lambda", "tau"):
        if key in p and tag != {"lambda": "Blambda", "tau": "Btau"}[key]:
            raise ConfigurationError(
                f"line {lines['params'][key]}: {key} is only valid for the matching kernel"
            )

    params = ModelParams(
        D_T=p["D_T"], Pe=p["Pe"], gamma=p["gamma"], alpha=p["alpha"], kernel=kernel
    )

    init_kwargs = values.get("initial", {})
    preset = init_kwargs.get("preset", "uniform")
    if preset not in ("uniform", "two_bump", "custom"):
        raise ConfigurationError(
            f"line {lines['initial']['preset']}: unknown preset {preset!r}"
        )
    if preset == "custom" and "expression" not in init_kwargs:
        raise ConfigurationError("preset = custom requires an 'expression' key")
    initial = InitialSpec(**init_kwargs)

    s = values.get("solver", {})
    elliptic_kwargs = {}
    if "elliptic_tol" in s:
        elliptic_kwargs["rel_residual_tol"] = s.pop("elliptic_tol")
    if "elliptic_method" in s:
        method = s.pop("elliptic_method")
        if method not in ("spectral", "direct", "iterative"):
            raise ConfigurationError(
                f"line {lines['solver']['elliptic_method']}: unknown elliptic method {method!r}"
            )
        elliptic_kwargs["method"] = method
    try:
        solver = StepOptions(elliptic=EllipticOptions(**elliptic_kwargs), **s)
    except ValueError as exc:
        raise ConfigurationError(f"invalid [solver] settings: {exc}") from exc

    o = values.get("output", {})
    output = OutputSpec(**o)
    for fmt in output.formats:
        if fmt != "f64":
            raise ConfigurationError(f"unknown output format {fmt!r} (only 'f64')")

    return RunConfig(
        n_x=g["n_x"],
        n_y=g["n_y"],
        n_theta=g["n_theta"],
        dt=g["dt"],
        t_final=g["t_final"],
        params=params,
        initial=initial,
        solver=solver,
        output=output,
    )


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


# ---------------------------------------------------------------------------
# initial conditions


def _torus_segments(center: float, half_width: float) -> list[tuple[float, float]]:
    """Intervals |x - center| <= half_width reduced onto [-1/2, 1/2)."""
    if half_width >= 0.5:
        return [(-0.5, 0.5)]
    lo = center - half_width
    lo -= math.floor(lo + 0.5)  # shift lo into [-1/2, 1/2)
    hi = lo + 2.0 * half_width
    if hi <= 0.5:
        return [(lo, hi)]
    return [(lo, 0.5), (-0.5, hi - 1.0)]


def _merge_segments(segments: list[tuple[float, float]]) -> list[tuple[float, float]]:
    segments = sorted(segments)
    merged = [segments[0]]
    for lo, hi in segments[1:]:
        if lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def two_bump_field(grid: GridSpec, center_offset: float, half_width: float) -> DensityField:
    """Indicator initial data on |x -+ center_offset| <= half_width, mass one.

    Cell averages are computed from exact interval overlaps, so the field is
    exact for any alignment and the discrete mass is one by construction.
    """
    if half_width <= 0:
        raise ConfigurationError("two_bump half_width must be positive")
    segments = _merge_segments(
        _torus_segments(center_offset, half_width)
        + _torus_segments(-center_offset, half_width)
    )
    left = grid.x_centers - grid.dx / 2.0
    right = grid.x_centers + grid.dx / 2.0
    overlap = np.zeros(grid.n_x)
    for lo, hi in segments:
        overlap += np.clip(np.minimum(right, hi) - np.maximum(left, lo), 0.0, None)
    vals = np.broadcast_to((overlap / grid.dx)[:, None, None], grid.shape).copy()
    total = vals.sum() * grid.cell_volume
    if total <= 0:
        raise ConfigurationError("two_bump support does not intersect the mesh")
    return DensityField(grid, vals / total)


_EXPR_NAMES = {
    "np": np,
    "pi": math.pi,
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "tanh": np.tanh,
    "cosh": np.cosh,
    "sinh": np.sinh,
    "where": np.where,
    "maximum": np.maximum,
    "minimum": np.minimum,
}


def initial_field(spec: InitialSpec, grid: GridSpec) -> DensityField:
    """Materialize an initial-condition preset on a grid."""
    if spec.preset == "uniform":
        return DensityField(grid, np.full(grid.shape, 1.0 / TWO_PI))
    if spec.preset == "two_bump":
        return two_bump_field(grid, spec.center_offset, spec.half_width)
    if spec.preset == "custom":
        expression = spec.expression

        def f0(x, y, theta):
            namespace = dict(_EXPR_NAMES, x=x, y=y, theta=theta)
            return eval(expression, {"__builtins__": {}}, namespace)  # noqa: S307

        return cell_average_init(
            f0, grid, quadrature_order=spec.quadrature_order, normalize=spec.normalize
        )
    raise ConfigurationError(f"unknown preset {spec.preset!r}")


def materialize(
    config: RunConfig, n_override: int | None = None
) -> tuple[GridSpec, ModelParams, DensityField, StepOptions, tuple[float, ...]]:
    """Build the grid, parameters, initial field, and options for one run.

    ``n_override`` replaces both the x- and theta-counts, which is how the
    mesh families of the convergence study are generated.
    """
    n_x = n_override if n_override is not None else config.n_x
    n_theta = n_override if n_override is not None else config.n_theta
    grid = build_grid(n_x, config.n_y, n_theta, config.dt, config.t_final)
    f0 = initial_field(config.initial, grid)
    return grid, config.params, f0, config.solver, config.output.snapshot_times


# ---------------------------------------------------------------------------
# snapshot serialization


@dataclass(frozen=True)
class SnapshotMeta:
    grid: GridSpec
    params: ModelParams | None
    time: float
    step: int
    version: str = SNAPSHOT_VERSION


def _grid_to_json(grid: GridSpec) -> dict:
    return {
        "n_x": grid.n_x,
        "n_y": grid.n_y,
        "n_theta": grid.n_theta,
        "dx": grid.dx,
        "dy": grid.dy,
        "dtheta": grid.dtheta,
        "dt": grid.dt,
        "n_steps": grid.n_steps,
    }


def _params_to_json(params: ModelParams | None) -> dict | None:
    if params is None:
        return None
    return {
        "D_T": params.D_T,
        "Pe": params.Pe,
        "gamma": params.gamma,
        "alpha": params.alpha,
        "kernel": params.kernel.tag,
        "reach": params.kernel.reach,
    }


def _meta_path(path: Path) -> Path:
    return path.with_suffix(".meta.json")


def write_snapshot(f: DensityField, meta: SnapshotMeta, path: str | Path) -> None:
    """Write the payload (little-endian float64, k fastest) plus JSON sidecar."""
    path = Path(path)
    if f.grid != meta.grid:
        raise SnapshotFormatError("snapshot metadata grid differs from the field grid")
    payload = np.ascontiguousarray(f.values, dtype="<f8").tobytes(order="C")
    doc = {
        "version": meta.version,
        "byte_order": "little",
        "index_order": "i,j,k;k-fastest",
        "grid": _grid_to_json(meta.grid),
        "params": _params_to_json(meta.params),
        "time": meta.time,
        "step": meta.step,
    }
    path.write_bytes(payload)
    _meta_path(path).write_text(json.dumps(doc, indent=1), encoding="utf-8")


def read_snapshot(path: str | Path) -> tuple[DensityField, SnapshotMeta]:
    """Read a snapshot pair back; bit-exact inverse of write_snapshot."""
    path = Path(path)
    try:
        doc = json.loads(_meta_path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SnapshotFormatError(f"cannot read metadata for {path}: {exc}") from exc
    if doc.get("version") != SNAPSHOT_VERSION:
        raise SnapshotFormatError(
            f"unsupported snapshot version {doc.get('version')!r}"
        )
    if doc.get("byte_order") != "little":
        raise SnapshotFormatError(f"unsupported byte order {doc.get('byte_order')!r}")
    try:
        grid = GridSpec(**doc["grid"])
        p = doc["params"]
        params = None
        if p is not None:
            params = ModelParams(
                D_T=p["D_T"],
                Pe=p["Pe"],
                gamma=p["gamma"],
                alpha=p["alpha"],
                kernel=KernelKind(p["kernel"], p["reach"]),
            )
        meta = SnapshotMeta(
            grid=grid, params=params, time=doc["time"], step=doc["step"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SnapshotFormatError(f"corrupt metadata for {path}: {exc}") from exc

    payload = path.read_bytes()
    expected = grid.n_cells * 8
    if len(payload) != expected:
        raise SnapshotFormatError(
            f"payload length {len(payload)} does not match grid "
            f"({grid.n_x}x{grid.n_y}x{grid.n_theta} cells needs {expected} bytes)"
        )
    values = np.frombuffer(payload, dtype="<f8").reshape(grid.shape)
    return DensityField(grid, values.astype(np.float64)), meta


# ---------------------------------------------------------------------------
# orchestration


def _write_diagnostics_csv(result: SimulationResult, path: Path) -> None:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for s in result.steps:
            writer.writerow(
                [
                    s.step,
                    repr(s.time),
                    repr(s.mass),
                    repr(s.min_f),
                    repr(s.l2),
                    repr(s.linf),
                    repr(s.steady_l2),
                    repr(s.steady_linf),
                    s.picard_iters,
                ]
            )


def _write_outputs(result: SimulationResult, out_dir: Path, params: ModelParams) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_diagnostics_csv(result, out_dir / "diagnostics.csv")
    for time, f in result.snapshots:
        step = round(time / result.grid.dt)
        meta = SnapshotMeta(grid=result.grid, params=params, time=time, step=step)
        write_snapshot(f, meta, out_dir / f"snap_{step:06d}.f64")


def _cmd_run(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    out_dir = Path(args.out) if args.out else Path(config.output.directory)
    grid, params, f0, opts, schedule = materialize(config)
    try:
        result = run_simulation(f0, params, opts, snapshot_times=schedule)
    except SimulationError as exc:
        _write_outputs(exc.partial, out_dir, params)
        print(f"error: {exc} (partial outputs in {out_dir})", file=sys.stderr)
        return 1
    _write_outputs(result, out_dir, params)
    last = result.steps[-1]
    print(
        f"run finished: {grid.n_steps} steps, mass {last.mass:.12f}, "
        f"min {last.min_f:.3e}, steady metric L2 {last.steady_l2:.3e} "
        f"(outputs in {out_dir})"
    )
    return 0


def _parse_int_list(raw: str) -> list[int]:
    return [int(part) for part in raw.split(",") if part.strip()]


def _cmd_converge(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    meshes = _parse_int_list(args.meshes)
    out_dir = Path(args.out) if args.out else Path(config.output.directory)
    for n in meshes:
        if args.ref % n != 0:
            raise ConfigurationError(f"mesh N={n} does not divide reference N={args.ref}")

    finals = run_mesh_family(config, [*meshes, args.ref])
    rows = []
    for n in meshes:
        e2 = relative_error(finals[n], finals[args.ref], "L2")
        ei = relative_error(finals[n], finals[args.ref], "Linf")
        rows.append((n, 1.0 / n, e2, ei))

    slope2 = fit_slope([r[1] for r in rows], [r[2] for r in rows])
    slopei = fit_slope([r[1] for r in rows], [r[3] for r in rows])

    out_dir.mkdir(parents=True, exist_ok=True)
    with (out_dir / "errors.csv").open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["N", "h", "e_L2", "e_Linf"])
        for n, h, e2, ei in rows:
            writer.writerow([n, repr(h), repr(e2), repr(ei)])

    print(f"# reference N={args.ref}")
    for n, h, e2, ei in rows:
        print(f"N={n:<5d} h={h:<12.6g} e_L2={e2:.6e} e_Linf={ei:.6e}")
    print(
        "slope_L2="
        + ("degenerate" if slope2 is None else f"{slope2:.4f}")
        + "  slope_Linf="
        + ("degenerate" if slopei is None else f"{slopei:.4f}")
    )
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    out_dir = Path(args.out) if args.out else Path(config.output.directory)
    reaches = [float(part) for part in args.lambdas.split(",") if part.strip()]

    rows = []
    for reach in reaches:
        finals = {}
        for tag in ("Blambda", "Btau"):
            params = ModelParams(
                D_T=config.params.D_T,
                Pe=config.params.Pe,
                gamma=config.params.gamma,
                alpha=config.params.alpha,
                kernel=KernelKind(tag, reach),
            )
            grid, _, f0, opts, _ = materialize(config)
            finals[tag] = run_simulation(f0, params, opts).final_f
        err = kernel_difference(finals["Blambda"], finals["Btau"], args.norm)
        rows.append((reach, err))
        print(f"lambda=tau={reach:<8g} e_{args.norm}={err:.6e}")

    out_dir.mkdir(parents=True, exist_ok=True)
    with (out_dir / "kernel_compare.csv").open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["lambda", f"e_{args.norm}"])
        for reach, err in rows:
            writer.writerow([repr(reach), repr(err)])
    return 0


def _cmd_smoke3d(args: argparse.Namespace) -> int:
    """Reduced-size fully three-dimensional run with the curvature kernel."""
    grid = build_grid(args.size, args.size, args.n_theta, 1e-3, args.t_final)
    params = ModelParams(
        D_T=1e-2, Pe=3.0, gamma=250.0, alpha=1.0, kernel=KernelKind("Btau", 0.5)
    )

    def blob(x, y, theta):
        return np.exp(-(x**2 + y**2) / (2.0 * 0.15**2)) + 0.0 * theta

    f0 = cell_average_init(blob, grid, quadrature_order=3, normalize=True)
    out_dir = Path(args.out)
    try:
        result = run_simulation(f0, params, StepOptions(), snapshot_times=(0.0, args.t_final))
    except SimulationError as exc:
        _write_outputs(exc.partial, out_dir, params)
        print(f"error: {exc} (partial outputs in {out_dir})", file=sys.stderr)
        return 1
    _write_outputs(result, out_dir, params)
    last = result.steps[-1]
    worst_mass = max(abs(s.mass - result.steps[0].mass) for s in result.steps)
    worst_min = min(s.min_f for s in result.steps)
    print(
        f"3d smoke finished: {grid.n_steps} steps on "
        f"{grid.n_x}x{grid.n_y}x{grid.n_theta}, final mass {last.mass:.12f}, "
        f"max |mass drift| {worst_mass:.3e}, min f {worst_min:.3e} "
        f"(outputs in {out_dir})"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="antfvm",
        description="Finite-volume solver for the kinetic chemotaxis model",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one simulation from a config file")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", help="override the output directory")
    p_run.set_defaults(func=_cmd_run)

    p_conv = sub.add_parser("converge", help="mesh-refinement error study")
    p_conv.add_argument("--config", required=True)
    p_conv.add_argument("--meshes", required=True, help="comma list, e.g. 16,32,64")
    p_conv.add_argument("--ref", required=True, type=int)
    p_conv.add_argument("--out", help="override the output directory")
    p_conv.set_defaults(func=_cmd_converge)

    p_cmp = sub.add_parser("compare", help="look-ahead vs curvature kernel difference")
    p_cmp.add_argument("--config", required=True)
    p_cmp.add_argument("--lambdas", required=True, help="comma list, e.g. 0.2,0.1,0.05")
    p_cmp.add_argument("--norm", default="L2")
    p_cmp.add_argument("--out", help="override the output directory")
    p_cmp.set_defaults(func=_cmd_compare)

    p_smoke = sub.add_parser("smoke3d", help="reduced-size fully 3D run")
    p_smoke.add_argument("--size", type=int, default=12, help="x and y cell count")
    p_smoke.add_argument("--n-theta", type=int, default=8)
    p_smoke.add_argument("--t-final", type=float, default=0.05)
    p_smoke.add_argument("--out", default="out_smoke3d")
    p_smoke.set_defaults(func=_cmd_smoke3d)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, SnapshotFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except StudyError as exc:
        completed = ", ".join(str(n) for n in exc.completed) or "none"
        print(f"error: {exc} (completed meshes: {completed})", file=sys.stderr)
        return 1
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
