"""Exception hierarchy shared by all sdgf modules."""


class SDGFError(Exception):
    """Base class; the CLI reports these as one-line diagnostics."""

    module = "sdgf"

    def __str__(self) -> str:
        return f"{self.module}: {super().__str__()}"


class LatticeError(SDGFError, ValueError):
    module = "gabor"


class NonDivisor(LatticeError):
    pass


class NotAFrame(LatticeError):
    pass


class UnknownKind(SDGFError, ValueError):
    module = "sdgf"


class IndexOutOfRange(SDGFError, IndexError):
    module = "gabor"


class DimensionMismatch(SDGFError, ValueError):
    module = "sdgf"


class NotInvertible(SDGFError, ValueError):
    module = "zauner"


class DimensionTooLargeForDense(SDGFError, ValueError):
    module = "zauner"


class DimensionNotCompliant(SDGFError, ValueError):
    module = "zauner"


class EigenvectorNotFound(SDGFError, RuntimeError):
    module = "zauner"


class BudgetExceeded(SDGFError, RuntimeError):
    module = "frames"


class Infeasible(SDGFError, RuntimeError):
    module = "solvers"


class UnsupportedFormat(SDGFError, ValueError):
    module = "signals"


class TooShort(SDGFError, ValueError):
    module = "signals"


class ZeroReference(SDGFError, ValueError):
    module = "experiments"


class ParseError(SDGFError, ValueError):
    module = "config"


class SchemaError(SDGFError, ValueError):
    module = "config"
