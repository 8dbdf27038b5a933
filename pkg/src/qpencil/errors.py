"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: validation and schema problems exit 1,
numerical failures exit 2, I/O problems exit 3.
"""


class PencilError(Exception):
    """Base class for all package-specific errors."""


class SchemaError(PencilError):
    """A problem or family file violates the JSON schema."""


class ValidationError(PencilError):
    """A problem failed model validation.

    Carries the list of Violation tuples produced by model.validate.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(f"{v.path}: {v.message}" for v in self.violations)
        super().__init__(f"invalid problem: {lines}")


class NumericalError(PencilError):
    """Base class for failures of the numerical machinery."""


class SolutionOverflowError(NumericalError):
    """|y| or |y'| exceeded the overflow guard during integration."""


class StiffnessError(NumericalError):
    """Adaptive step size underflowed; the stepper cannot proceed."""


class ClusterUnresolvedError(NumericalError):
    """Two characteristic-function roots fall within refinement tolerance."""


class AtPoleError(NumericalError):
    """Weyl function requested at (or numerically at) an eigenvalue.

    `estimate` holds a one-step Newton estimate of the offending eigenvalue.
    """

    def __init__(self, lam, estimate):
        self.lam = lam
        self.estimate = estimate
        super().__init__(
            f"at pole: lambda={lam} is numerically an eigenvalue "
            f"(nearest estimate {estimate})"
        )


class PoleCollisionError(NumericalError):
    """A model evaluation inside the misfit hit a pole even after the
    documented one-shot grid perturbation."""


class NoConvergenceError(NumericalError):
    """No optimizer restart converged. `best` carries the best-so-far FitResult."""

    def __init__(self, message, best):
        self.best = best
        super().__init__(message)


class EmptyGridError(PencilError):
    """A sampling grid is empty (possibly after pole exclusion)."""
