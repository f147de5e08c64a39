"""Exception hierarchy shared across the library."""


class TaudetError(Exception):
    """Base class for all library errors."""


class DomainError(TaudetError):
    """Argument outside the supported domain of a function or constructor."""


class SingularGamma(DomainError):
    """A gamma-type function was evaluated at a non-positive integer pole."""


class NonConvergence(TaudetError):
    """An iterative or quadrature-based computation failed its tolerance."""


class DegenerateParams(TaudetError):
    """Parameter combination where the Tracy-Widom normalization degenerates (w = w')."""


class NoAdmissibleBranch(TaudetError):
    """No branch of the multivalued parameter identification is admissible."""


class InconsistentInit(TaudetError):
    """ODE initial data failed its small-t consistency check."""


class StepSizeUnderflow(TaudetError):
    """Adaptive integrator step size shrank below the representable minimum."""


class PoleEncountered(TaudetError):
    """A Painleve transcendent approached one of its movable/fixed poles."""


class InsufficientGrid(TaudetError):
    """Curve grid too sparse or irregular for finite-difference differentiation."""


class IllConditionedFit(TaudetError):
    """Least-squares extraction design matrix is numerically rank deficient."""


class TailBoundViolation(TaudetError):
    """Semi-infinite truncation could not certify the requested tail bound."""


class BranchInversionFailure(TaudetError):
    """Numerical inversion of an algebraic-solution branch map failed."""
