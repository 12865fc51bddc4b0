"""Exception hierarchy shared by the library and the CLI."""


class DataError(ValueError):
    """Invalid input data (bad ids, malformed files, violated preconditions)."""


class FormatError(DataError):
    """A malformed line in a text input file."""

    def __init__(self, message, lineno=None, path=None):
        self.lineno = lineno
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)


class NumericalError(ArithmeticError):
    """A numerical precondition failed (non-PSD matrix, solver breakdown)."""
