"""Exception hierarchy shared by all modules."""


class ReflCheckError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(ReflCheckError, ValueError):
    pass


class ContextMismatch(InvalidInput):
    """Operands were built over different indeterminate sets."""


class PoleError(ReflCheckError, ZeroDivisionError):
    """A denominator evaluated to zero at a concrete point."""


class SingularSubstitution(PoleError):
    """A substitution made a denominator vanish identically."""


class RangeError(ReflCheckError, IndexError):
    """A function table was accessed outside its stored window."""


class InvalidParameters(InvalidInput):
    """Hypergeometric parameters outside the admissible region."""


class ConvergenceError(ReflCheckError, ArithmeticError):
    pass


class NoSolution(ReflCheckError):
    pass


class InvalidRule(InvalidInput):
    pass


class InvalidPresentation(InvalidInput):
    pass
