"""Exception types shared across the solver."""


class ConfigurationError(ValueError):
    """Inconsistent grid, run, or config-file settings."""


class EllipticSolveError(RuntimeError):
    """Chemical-field solve failed to meet its residual tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class LinearSolveError(RuntimeError):
    """Implicit-step linear system failed to meet its residual tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class PicardConvergenceError(RuntimeError):
    """Fixed-point iteration for the coupled implicit step did not converge."""

    def __init__(self, message: str, increment: float, iterations: int):
        super().__init__(message)
        self.increment = increment
        self.iterations = iterations


class StepInvariantError(RuntimeError):
    """A structure-preservation guarantee (mass, nonnegativity) was violated."""


class SnapshotFormatError(RuntimeError):
    """Snapshot payload or metadata is corrupt or inconsistent."""


class SimulationError(RuntimeError):
    """A step failed mid-run; carries the partial trajectory computed so far.

    The ``partial`` attribute holds a SimulationResult with everything up to
    the failing step.
    """

    def __init__(self, message: str, partial, cause: Exception):
        super().__init__(message)
        self.partial = partial
        self.cause = cause


class StudyError(RuntimeError):
    """A mesh-family study aborted; carries the runs that did complete.

    ``completed`` maps mesh count to the final field of each finished run.
    """

    def __init__(self, message: str, completed: dict, cause: Exception):
        super().__init__(message)
        self.completed = completed
        self.cause = cause
