"""Finite-volume solver for a kinetic chemotaxis model on a periodic domain.

The state is a cell-averaged density f(t, x, y, theta) coupled to a chemical
concentration c(t, x, y) through a screened-Poisson equation.  The package
provides the discretization (grid), the chemical solve (chemo), the angular
drift kernels (kernels), the implicit time stepper (stepper), observables and
mesh studies (diagnostics), and configuration/serialization plus the command
line front end (cli).
"""

from .chemo import EllipticOptions, solve_chemical
from .cli import (
    InitialSpec,
    OutputSpec,
    RunConfig,
    SnapshotMeta,
    initial_field,
    load_config,
    materialize,
    parse_config,
    read_snapshot,
    two_bump_field,
    write_snapshot,
)
from .diagnostics import (
    ConvergenceTable,
    ObservableSeries,
    convergence_study,
    fit_slope,
    inject_to_fine,
    kernel_difference,
    metric_series,
    polarization,
    relative_error,
    run_mesh_family,
    second_polarization,
    spatial_density,
    steady_state_metric,
)
from .errors import (
    ConfigurationError,
    EllipticSolveError,
    LinearSolveError,
    PicardConvergenceError,
    SimulationError,
    SnapshotFormatError,
    StepInvariantError,
    StudyError,
)
from .grid import (
    DensityField,
    DualField,
    GridSpec,
    SpatialField,
    build_grid,
    cell_average_init,
    centered_gradient,
    ddtheta,
    ddx,
    ddy,
    discrete_hessian,
    lp_norm,
    sobolev_seminorm,
    sup_norm,
)
from .kernels import (
    KernelKind,
    KernelValues,
    ShiftTable,
    build_shift_table,
    curvature_kernel,
    dtheta_B,
    eval_B0,
    eval_Blambda,
    eval_Btau,
    eval_kernel,
    local_gradient_kernel,
    look_ahead_kernel,
)
from .stepper import (
    ModelParams,
    SimulationResult,
    StepDiagnostics,
    StepOptions,
    StepResult,
    advance_step,
    apply_operator,
    run_simulation,
    upwind_velocities,
)

__version__ = "0.1.0"
