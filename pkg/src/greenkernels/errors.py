"""Exception hierarchy shared by all modules."""


class GreenKernelError(Exception):
    """Base class for every error raised by this package."""


class ValidationFailure(GreenKernelError, ValueError):
    """Bad configuration or domain description (CLI exit code 1)."""


class NumericalFailure(GreenKernelError, ArithmeticError):
    """A solver or series could not reach its accuracy target (CLI exit code 2)."""


class Singular(GreenKernelError, ValueError):
    """Kernel evaluated on its diagonal x == y."""


class NotInDomain(ValidationFailure):
    """Point lies outside the domain the operation is defined on."""


class NotInPerforatedDomain(NotInDomain):
    pass


class OutsideExterior(NotInDomain):
    pass


class NotInRod(NotInDomain):
    pass


class NotInTruncatedSector(NotInDomain):
    pass


class OutsideStrip(NotInDomain):
    """Pair lies outside the thin boundary neighbourhood {rho <= d0}."""


class AmbiguousProjection(GreenKernelError):
    """Two or more boundary points are equally near.

    ``candidates`` holds every tied boundary parameter, ``choice`` the
    deterministic pick (smallest parameter) with its ProjectionResult.
    """

    def __init__(self, message, candidates=(), choice=None):
        super().__init__(message)
        self.candidates = tuple(candidates)
        self.choice = choice


class UnsupportedBoundary(ValidationFailure):
    pass


class EmptyGrid(ValidationFailure):
    pass


class HolesOverlap(ValidationFailure):
    pass


class ConstraintViolated(ValidationFailure):
    """Simplified corollary formula used outside its validity region."""


class DenominatorDegenerate(NumericalFailure):
    pass


class QuadratureUnderResolved(NumericalFailure):
    pass


class TruncationFailure(NumericalFailure):
    pass


class IllConditioned(NumericalFailure):
    pass


class BadRadii(ValidationFailure):
    pass


class InsufficientData(GreenKernelError):
    pass


class ZeroError(GreenKernelError):
    """Every error in the stratum is exactly zero; the formula is exact there."""


class MissingStratum(GreenKernelError):
    pass


OutsideRod = NotInRod
OutsideSector = NotInTruncatedSector
