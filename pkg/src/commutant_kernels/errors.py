"""Exception types shared across the package."""


class CommutantError(Exception):
    """Base class for all library-specific failures."""


class ParameterDomainError(CommutantError, ValueError):
    """Case parameters violate their admissible domain."""


class DegenerateError(CommutantError, ValueError):
    """Parameters collapse the kernel or operator to a trivial object."""


class DegreeCapError(CommutantError, ValueError):
    """Polynomial degree exceeded the hard cap of the algebra."""


class PoleHitError(CommutantError, ArithmeticError):
    """Evaluation requested at a non-removable pole."""


class IllConditionedError(CommutantError, ArithmeticError):
    """Discretization too large for reliable dense linear algebra."""


class NoConvergenceError(CommutantError, ArithmeticError):
    """Dense eigen/SVD solver failed to converge."""


class RankCollapseError(CommutantError, ArithmeticError):
    """Requested singular values fall below the numerical rank floor."""


class ZeroLeadingError(CommutantError, ValueError):
    """All leading series coefficients vanish; the kernel is forced to zero."""


class ConventionMismatchError(CommutantError, ValueError):
    """Taylor data supplied in the wrong normalization convention."""


class IoFailureError(CommutantError, OSError):
    """Report files could not be written."""
