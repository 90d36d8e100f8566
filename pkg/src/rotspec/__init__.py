"""Periodic minimal profile curves in spheres and their operator spectra.

The package builds closed profile curves whose rotation by a product of
spheres produces minimal hypersurfaces of the unit sphere, then computes
the spectra of the Laplace and stability operators on those hypersurfaces
through Floquet-discriminant root finding, including stability indices and
nullities.
"""

from .errors import (
    ConfigError,
    DomainGuardError,
    EventNotFoundError,
    IntegrationError,
    LargeResidualError,
    NonConvergenceError,
    NonFiniteDerivativeError,
    NoSignChangeError,
    RotspecError,
    ShootingError,
    StepLimitExceededError,
)
from .geometry import (
    CurvatureBundle,
    ProfileState,
    RotationParams,
    curvature_bundle,
    f_derivatives,
    fgh,
    turning_rate,
)
from .ivp import (
    IntegratorConfig,
    OdeSystem,
    Trajectory,
    integrate,
    integrate_until,
)
from .profile import (
    PeriodicProfile,
    ShootingProblem,
    SweepResult,
    find_bracket,
    half_flight,
    profile_from_a0,
    sample_profile,
    shooting_residual,
    solve_periodic,
    table_sweep,
)
from .spectrum import (
    AuditResult,
    DiscriminantCurve,
    EigenRecord,
    ModeIndex,
    MonodromyMatrix,
    OperatorKind,
    SpectrumGroup,
    SpectrumReport,
    analytic_eigenfunction_residual,
    assemble_spectrum,
    audit_pruned,
    coefficients,
    discriminant,
    discriminant_curve,
    lambda_grid,
    mode_index,
    scan_and_refine,
    sphere_eigen,
)
from .checks import CheckResult, run_profile_checks

__version__ = "0.1.0"
