"""Exception hierarchy shared by all windnpp modules."""


class WindNppError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(WindNppError, ValueError):
    pass


class ParseError(WindNppError, ValueError):
    """Malformed input file; message names the offending row/column."""


class SingularCurveError(InvalidInputError):
    pass


class ValidityDomainError(WindNppError, ValueError):
    """A formula was evaluated outside the domain where it is valid."""


class ConfigError(WindNppError, ValueError):
    pass


class GeneratorError(WindNppError, ValueError):
    """Rate matrix is not a valid CTMC generator."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class StiffnessError(WindNppError, RuntimeError):
    pass


class MultipleRecurrentClassError(WindNppError, ValueError):
    pass


class UndefinedLCOEError(WindNppError, ZeroDivisionError):
    pass


class EmptyWindowError(WindNppError, ValueError):
    pass
