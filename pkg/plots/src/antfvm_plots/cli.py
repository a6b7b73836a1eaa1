"""Command line front end mirroring the PlotJob fields."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from .io import PlotInputError
from .render import KINDS, OBSERVABLES, PlotJob, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="antfvm-plot",
        description="Render solver snapshots and study tables into figures",
    )
    parser.add_argument("--input", required=True, help="directory of run outputs")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--observable", default="rho", choices=OBSERVABLES)
    parser.add_argument("--output", required=True, help="image path (.png, .pdf, ...)")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = PlotJob(
            input_dir=Path(args.input),
            kind=args.kind,
            observable=args.observable,
            output=Path(args.output),
        )
        written = render(job)
    except (PlotInputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {written}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
