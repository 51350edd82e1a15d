"""Exception types shared across the package."""


class MzlabError(Exception):
    """Base class for all package-specific errors."""


class FieldMismatchError(MzlabError):
    """Operands belong to fields with different conductors."""


class VariableCountError(MzlabError):
    """Polynomial operands disagree on the number of variables."""


class DegreeCapError(MzlabError):
    """A construction or request exceeds the configured degree bound."""


class MapKindError(MzlabError):
    """A linear map of the wrong kind was passed to an operation."""


class SingularMatrixError(MzlabError):
    """Matrix inversion or conjugation was attempted with a singular matrix."""


class NilpotencyError(MzlabError):
    """The exponential series requires a nilpotent matrix."""


class JordanizeError(MzlabError):
    """Automatic canonicalization needs rational eigenvalues and n <= 3."""


class ClosedFormUnavailable(MzlabError):
    """No closed-form membership rule covers this case; use the solver."""


class MemberRegionError(MzlabError):
    """The requested preimage lies outside the constructive member region."""


class LTConditionError(MzlabError):
    """Leading-term elimination hit a monomial whose image breaks the
    triangularity hypothesis (zero or displaced leading term)."""


class ParseError(MzlabError):
    """Syntax or resolution error in expression text.

    ``position`` is the 1-based character offset where the error was
    detected.
    """

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.message = message
        self.position = position
