"""
Exception hierarchy shared by the numerical modules and the CLI
"""
from typing import Any, Dict, Optional


class TwlabError(Exception):
    """Base class for every error raised by the laboratory"""


class InvalidArgumentError(TwlabError, ValueError):
    """Parameters violate an operation's preconditions"""


class DomainError(TwlabError, ValueError):
    """Argument lies outside a working range"""


class BracketError(TwlabError, ValueError):
    """Root bracket without a sign change"""


class DataError(TwlabError):
    """Malformed sample or cache file"""


class DivergenceError(TwlabError, ArithmeticError):
    """ODE integration stopped because the step size underflowed"""

    def __init__(self, message: str, last_t: float):
        super().__init__(f"{message} (last reached t = {last_t:.6g})")
        self.last_t = last_t


class ConvergenceError(TwlabError, ArithmeticError):
    """Boundary-value solver failed to converge"""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ResolutionError(TwlabError, ArithmeticError):
    """Discretization too coarse for the requested evaluation"""

    def __init__(self, s: float, n: int):
        self.s = s
        self.n = n
        self.suggested_n = 2 * n
        super().__init__(
            f"Non-positive pivot in det(I - K) at s = {s:g} with n = {n}; "
            f"try n = {self.suggested_n}"
        )


EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the CLI exit code"""
    if isinstance(exc, (BracketError, DivergenceError, ConvergenceError, ResolutionError)):
        return EXIT_NUMERICAL
    if isinstance(exc, (InvalidArgumentError, DomainError)):
        return EXIT_USAGE
    return EXIT_DATA
