"""Exception hierarchy shared by the symbolic and numeric engines."""


class ChenError(Exception):
    """Base class for every error raised by chenloops."""


class ParseError(ChenError):
    """An algebra file (or a combination string inside it) is malformed."""


class AlgebraInvalid(ChenError):
    """A CDGA presentation violates one of the axioms.

    ``axiom`` names the violated rule, ``detail`` the offending basis data.
    """

    def __init__(self, axiom, detail=""):
        self.axiom = axiom
        self.detail = detail
        msg = axiom if not detail else f"{axiom} on {detail}"
        super().__init__(msg)


class MixedAlgebras(ChenError):
    pass


class DegreeOutOfRange(ChenError):
    pass


class DimensionMismatch(ChenError):
    pass


class CapTooSmall(ChenError):
    pass


class NoClassFound(ChenError):
    pass


class AntipodalSegment(ChenError):
    pass


class NotBasedAtX0(ChenError):
    pass


class BasepointMismatch(ChenError):
    pass


class ArityMismatch(ChenError):
    pass


class TargetMismatch(ChenError):
    pass


class DegreeMismatch(ChenError):
    pass


class BoundViolated(ChenError):
    """A one-sided inequality failed on a sampled frame.

    This always signals a bug in the evaluator, never new mathematics.
    """

    def __init__(self, message, frame=None, ratio=None):
        super().__init__(message)
        self.frame = frame
        self.ratio = ratio
