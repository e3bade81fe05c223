"""Exception hierarchy. Every error carries a short machine-readable ``kind``."""


class FinslerLieError(Exception):
    kind = "error"


class InputError(FinslerLieError, ValueError):
    """Malformed input: wrong shapes, unparsable files, non-finite entries."""

    kind = "input"

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class ParameterError(FinslerLieError, ValueError):
    kind = "parameter"


class ValidationError(FinslerLieError):
    """Structural identity (antisymmetry, Jacobi, I^2 = -Id, ...) fails."""

    kind = "validation"

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class IntegrabilityError(FinslerLieError):
    kind = "integrability"

    def __init__(self, message, worst_pair=None, max_entry=None):
        super().__init__(message)
        self.worst_pair = worst_pair
        self.max_entry = max_entry


class ClosureError(FinslerLieError):
    kind = "closure"


class DomainError(FinslerLieError, ValueError):
    kind = "domain"


class StronglyPseudoconvexViolation(FinslerLieError):
    kind = "pseudoconvexity"

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class NumericalDerivativeError(FinslerLieError):
    kind = "derivative"

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class PreconditionError(FinslerLieError):
    kind = "precondition"
