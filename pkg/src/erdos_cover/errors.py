"""Exception hierarchy.

Every domain failure derives from :class:`ErdosCoverError`; the CLI maps
these to exit status 2 and I/O failures (``OSError``) to exit status 1.
"""


class ErdosCoverError(Exception):
    """Base class for domain errors."""


class MalformedInterval(ErdosCoverError):
    pass


class ZeroScale(ErdosCoverError):
    pass


class BadParams(ErdosCoverError):
    pass


class ParseError(ErdosCoverError):
    pass


class DuplicatePoint(ErdosCoverError):
    pass


class EmptyPattern(ErdosCoverError):
    pass


class TooFewPoints(ErdosCoverError):
    pass


class NotFineEnough(ErdosCoverError):
    """Raised when no subset of a truncation is fine enough.

    ``stage`` is the failing stage (``None`` outside staged constructions)
    and ``best`` the best relative fineness found there.
    """

    def __init__(self, message, stage=None, best=None):
        super().__init__(message)
        self.stage = stage
        self.best = best


class OutOfRange(ErdosCoverError):
    pass


class NotDenseEnough(ErdosCoverError):
    pass


class NotClusteredEnough(ErdosCoverError):
    pass


class SelectionFailed(ErdosCoverError):
    def __init__(self, message, table=None):
        super().__init__(message)
        self.table = table or []


class TrialBudgetExceeded(ErdosCoverError):
    def __init__(self, message, best=None, bound=None):
        super().__init__(message)
        self.best = best
        self.bound = bound


class EmptyBox(ErdosCoverError):
    pass


class EmptyWindow(ErdosCoverError):
    pass


class AllMethodsFailed(ErdosCoverError):
    def __init__(self, message, reasons=None):
        super().__init__(message)
        self.reasons = reasons or {}


class WindowTooSmall(ErdosCoverError):
    pass


class UnknownCommand(ErdosCoverError):
    pass
