"""Forward and inverse spectral solver for a quadratic operator pencil.

The operator is -y'' + [2 lambda p(x) + q(x)] y = lambda^2 delta(x) y on
(0, pi) with y'(0) = 0, y(pi) = 0, a three-step density delta, and
lambda-dependent transmission conditions at the two density breakpoints.
The package computes boundary solutions by adaptive shooting, enumerates
eigenvalues through the characteristic determinant, checks the classical
spectral identities, samples the Weyl function, and recovers
finite-dimensional parameterizations from Weyl data.
"""
from .errors import (
    AtPoleError,
    ClusterUnresolvedError,
    EmptyGridError,
    NoConvergenceError,
    NumericalError,
    PencilError,
    PoleCollisionError,
    SchemaError,
    SolutionOverflowError,
    StiffnessError,
    ValidationError,
)
from .inverse import (
    PARAM_NAMES,
    FitResult,
    ParameterFamily,
    distinguishability,
    fit,
    misfit,
    realize,
    validate_family,
)
from .model import (
    PI,
    CoefficientFunction,
    DensityProfile,
    JumpParameters,
    PencilProblem,
    Violation,
    positivity_screen,
    problem_from_dict,
    problem_to_dict,
    validate,
)
from .oracle import oracle_delta, oracle_propagate, oracle_weyl
from .propagator import (
    DEFAULT_CONTROL,
    ShootingState,
    SolutionTrace,
    StepControl,
    integrate_region,
    psi_endpoints,
    solve_initial_value,
    solve_phi,
    solve_psi,
    solve_s,
    wronskian,
)
from .spectral import (
    AsymptoticRow,
    CharacteristicSample,
    EigenRecord,
    asymptotic_table,
    check_lemma4,
    check_orthogonality,
    delta,
    delta0,
    delta0_roots,
    find_eigenvalues,
    normalized_alpha,
    scan_characteristic,
)
from .weyl import (
    WeylSample,
    default_offaxis_grid,
    sample_weyl_grid,
    weyl_function,
    weyl_solution,
)

__version__ = "0.1.0"
