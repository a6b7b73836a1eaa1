"""Figure rendering for solver snapshot and diagnostics files.

Reads the documented on-disk formats only; the solver package is not a
dependency.
"""

from .io import PlotInputError, Snapshot, read_error_table, read_snapshot, read_snapshot_series
from .render import KINDS, OBSERVABLES, PlotJob, render

__version__ = "0.1.0"
