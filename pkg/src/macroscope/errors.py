"""Exception hierarchy shared by all modules."""


class MacroscopeError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(MacroscopeError):
    """A JSON payload does not conform to the documented schema.

    ``location`` names the offending file/field (e.g. ``inputs/povm.json:
    $.elements[2]``) so CLI users can fix the payload directly.
    """

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class DimensionMismatch(MacroscopeError):
    """Operands have incompatible dimensions."""


class NotHermitian(MacroscopeError):
    """A matrix required to be Hermitian is not, beyond tolerance."""


class NotPSD(MacroscopeError):
    """A matrix required to be positive semidefinite has a significantly
    negative eigenvalue."""


class InvalidPovm(MacroscopeError):
    """POVM elements fail positivity or do not sum to the identity."""


class InvalidStochasticMap(MacroscopeError):
    """Conditional-probability matrix has invalid entries or row sums."""


class PreconditionViolated(MacroscopeError):
    """Caller-supplied inputs do not satisfy an operation's precondition."""


class PriorNotInvertible(MacroscopeError):
    """The prior state has (numerically) vanishing eigenvalues."""


class ImageNotInvertible(MacroscopeError):
    """The channel image of the prior is singular, so no recovery map exists."""


class MarginalNotInvertible(MacroscopeError):
    """A reduced state required to be full rank is singular."""


class IndeterminateDifference(MacroscopeError):
    """Both divergences in a deficit are infinite; the difference is undefined."""


class TooManyOutcomes(MacroscopeError):
    """Brute-force partition enumeration refused (Bell-number guard)."""


class MpppNotTrivial(MacroscopeError):
    """A scenario requiring a trivial maximal projective post-processing was
    given a measurement that splits into more than one block."""


class NotARepresentation(MacroscopeError):
    """Supplied unitaries are not closed under products (or lack the identity)."""


class NontrivialMultiplicity(MacroscopeError):
    """Group representation has a non-abelian commutant, i.e. repeated irreps."""


class TheoremViolation(MacroscopeError):
    """Conditions proved equivalent disagreed numerically.

    This is never a verdict about the input; it indicates a tolerance or
    logic bug and is surfaced loudly instead of being absorbed.
    """


class ConsistencyError(MacroscopeError):
    """Two independent constructions of the same object disagreed."""
