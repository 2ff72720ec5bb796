"""Exception types raised across the package."""


class QToricError(Exception):
    """Base class for every error raised by qtoric."""


class DivisionByZero(QToricError, ZeroDivisionError):
    pass


class AmbiguousSign(QToricError, ArithmeticError):
    """The interval oracle ran out of precision without separating from zero.

    Raised instead of guessing. It means one of: an enclosure that does not
    actually contain the symbol's value, a symbol without a refiner whose
    initial enclosure is too coarse, or symbols that are not algebraically
    independent (so the value really is zero).
    """


class Inconsistent(QToricError, ValueError):
    """A linear system has no solution."""


class NotStronglyConvex(QToricError, ValueError):
    pass


class NoCompletion(QToricError, ValueError):
    """No set of non-virtual columns completes a cone's span to the ambient space."""


class DiagramFailure(QToricError):
    """A commutative-diagram identity failed to hold exactly."""

    def __init__(self, identity, detail=""):
        self.identity = identity
        super().__init__(f"{identity}: {detail}" if detail else identity)


class NotAFace(QToricError, ValueError):
    pass


class EmptyIntersection(QToricError, ValueError):
    pass


class Mismatch(QToricError, ValueError):
    """Objects that must share a source/target (or a basis) do not."""


class BlockFormViolation(QToricError):
    pass


class KernelNotPreserved(QToricError):
    pass


class ScaleExceeded(QToricError):
    """Input exceeds the hard caps of a brute-force routine."""


class DimUnsupported(QToricError, ValueError):
    pass


class SchemaError(QToricError, ValueError):
    """A document failed validation; ``path`` is a JSON pointer."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path or '/'}: {message}")
