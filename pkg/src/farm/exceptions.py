"""Exception hierarchy shared by the library and the command line."""


class FarmError(Exception):
    """Base class for all errors raised by :mod:`farm`."""

    exit_code = 1


class InvalidInputError(FarmError, ValueError):
    """An argument violates a documented precondition."""

    exit_code = 2


class UndefinedResultError(FarmError, ArithmeticError):
    """The requested quantity has no defined value for the given data."""

    exit_code = 2


class ParseError(FarmError, ValueError):
    """A series or config file could not be parsed."""

    exit_code = 3

    def __init__(self, message, path=None, row=None):
        self.path = path
        self.row = row
        where = ""
        if path is not None:
            where += f"{path}"
        if row is not None:
            where += f" (row {row})"
        super().__init__(f"{where}: {message}" if where else message)


class FarmIOError(FarmError, OSError):
    """A file could not be read or written."""

    exit_code = 4
