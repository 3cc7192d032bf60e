"""Exception hierarchy shared by every module of the package."""


class PermlatError(Exception):
    """Base class for all package errors."""


class InputError(PermlatError, ValueError):
    """Malformed user input (fixture, JSON document, matrix shape)."""


class NoSolution(PermlatError):
    """A linear system has no solution over the p-local integers."""


class OrderNotPPower(InputError):
    pass


class OrderCapExceeded(InputError):
    pass


class NotASubgroup(InputError):
    pass


class NotNormal(InputError):
    pass


class WrongOrder(InputError):
    pass


class GroupMismatch(InputError):
    pass


class NotAHomomorphism(InputError):
    """Action matrices do not define a group homomorphism."""


class NotIdempotentModP(PermlatError):
    pass


class NotIndecomposable(PermlatError):
    pass


class PrecisionExhausted(PermlatError):
    """Idempotent splitting could not be verified at any allowed precision."""


class NotPermutationOverC(PermlatError):
    """Restriction to a subgroup of order p is not of the form trivial + free."""


class CandidateInvalid(PermlatError):
    """A supplied trivial-part candidate fails invariance, triviality or saturation."""


class SearchInconclusive(PermlatError):
    """A bounded search found no witness; this is not a disproof.

    The partial report, when available, is attached as ``report``.
    """

    def __init__(self, message: str = "", report=None):
        super().__init__(message)
        self.report = report


class PreconditionFailed(PermlatError):
    pass


class InternalInconsistency(PermlatError):
    """A computed object contradicts a proven structural fact."""


class SchemaError(InputError):
    """A JSON document does not match its schema; ``pointer`` locates the offending node."""

    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer or "/"
