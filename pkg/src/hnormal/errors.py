"""Exception hierarchy.

Every error carries a short machine-readable ``code`` (the class name) so the
CLI can embed it in reports and map it to an exit status.
"""


class HNormalError(Exception):
    """Base class for all library errors."""

    exit_code = 3

    @property
    def code(self):
        return type(self).__name__

    def __init__(self, message="", **details):
        super().__init__(message)
        self.details = details


# input validation ---------------------------------------------------------

class ValidationError(HNormalError):
    exit_code = 2


class NotHermitian(ValidationError):
    pass


class NearSingular(ValidationError):
    pass


class SingularH(ValidationError):
    pass


class SingularT(ValidationError):
    pass


class ParseError(ValidationError):
    pass


class BadRange(ValidationError):
    pass


class OutOfDomain(ValidationError):
    pass


# classification -----------------------------------------------------------

class ClassificationError(HNormalError):
    exit_code = 3


class NotHNormal(ClassificationError):
    pass


class RankTooHigh(ClassificationError):
    pass


class UnsupportedRank1Form(ClassificationError):
    pass


class EmptyS0(ClassificationError):
    pass


class S0NotNeutral(ClassificationError):
    pass


class WrongEigStructure(ClassificationError):
    pass


class ImpossibleCase(ClassificationError):
    """A configuration that cannot occur for an H-normal operator."""


class DecomposableDetected(ClassificationError):
    """A reducer found an invariant nondegenerate subspace."""


class InternalFormMismatch(ClassificationError):
    """A reduction chain did not land on its template (numerical breakdown)."""


class OracleFailure(HNormalError):
    exit_code = 4
