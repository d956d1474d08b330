"""Exception hierarchy shared by the library and the CLI"""

from typing import Optional


class AdrdError(Exception):
    """Base class for all errors raised by the toolkit"""

    exit_code: int = 1


class ConfigError(AdrdError, ValueError):
    """Invalid or inconsistent experiment configuration"""

    exit_code = 1


class DataError(AdrdError, ValueError):
    """Input data that violates a dataset invariant"""

    exit_code = 2


class ShapeError(DataError):
    """Arrays whose shapes or grids do not line up"""


class NumericalError(AdrdError, ArithmeticError):
    """Linear algebra failure that jitter could not repair"""

    exit_code = 3

    def __init__(self, message: str, jitter: Optional[float] = None):
        super().__init__(message)
        self.jitter = jitter


class InitializationError(NumericalError):
    """No usable starting point for the optimizer or sampler"""


def exit_code_for(error: BaseException) -> int:
    """Map an exception to the CLI exit code"""
    if isinstance(error, AdrdError):
        return error.exit_code
    return 1
