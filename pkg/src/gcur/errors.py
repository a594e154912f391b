"""Exception hierarchy shared by every gcur module."""


class GcurError(Exception):
    """Base class for all errors raised by gcur."""


class InputError(GcurError, ValueError):
    """Malformed or inconsistent input (maps to CLI exit code 2)."""


class DegenerateInputError(InputError):
    pass


class DimensionMismatchError(InputError):
    pass


class DomainError(InputError):
    """Parameter outside the domain of a closed-form bound."""


class MatrixMarketError(InputError):
    def __init__(self, message, path=None, line=None):
        where = ""
        if path is not None:
            where = f"{path}"
        if line is not None:
            where = f"{where}:{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)
        self.path = path
        self.line = line


class NumericalError(GcurError, ArithmeticError):
    """Numerical breakdown (maps to CLI exit code 3)."""


class RankDeficientSketch(NumericalError):
    """The sketch used for index selection has numerical rank below the target rank."""

    def __init__(self, rank, required, label=""):
        self.rank = rank
        self.required = required
        self.label = label
        side = f" ({label})" if label else ""
        super().__init__(
            f"sketch{side} has numerical rank {rank}, target rank is {required}"
        )


class RankDeficientFactor(NumericalError):
    """Selected columns (or rows) span fewer than the target rank directions."""

    def __init__(self, rank, required, label=""):
        self.rank = rank
        self.required = required
        self.label = label
        side = f" ({label})" if label else ""
        super().__init__(
            f"factor{side} has numerical rank {rank}, target rank is {required}"
        )


class SingularCoreError(NumericalError):
    pass


class UndefinedRelativeError(NumericalError):
    pass
