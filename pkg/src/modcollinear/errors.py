"""Exception hierarchy shared by the library and the CLI."""


class CollinearError(Exception):
    """Base class for all package errors."""


class ModulusError(CollinearError, ValueError):
    pass


class NotPrime(ModulusError):
    pass


class TooSmall(ModulusError):
    pass


class Even(ModulusError):
    pass


class DuplicatePoint(CollinearError, ValueError):
    pass


class InvalidPermutation(CollinearError, ValueError):
    pass


class SamePosition(CollinearError, ValueError):
    pass


class SlopeOutOfRange(CollinearError, ValueError):
    pass


class CapExceeded(CollinearError):
    pass


class BudgetExceeded(CollinearError):
    pass


class ProofAssertionFailure(CollinearError, AssertionError):
    """A step of the lower-bound argument failed on a concrete input.

    Every step is a theorem, so this always indicates an implementation bug.
    """

    def __init__(self, label, lhs, rhs, slope=None):
        self.label = label
        self.lhs = lhs
        self.rhs = rhs
        self.slope = slope
        where = f" (slope {slope})" if slope is not None else ""
        super().__init__(f"{label}{where} failed: lhs={lhs} rhs={rhs}")


class TheoremViolation(CollinearError, AssertionError):
    pass


class CounterMismatch(CollinearError, AssertionError):
    pass


class ParseError(CollinearError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class CorruptStore(CollinearError):
    pass
