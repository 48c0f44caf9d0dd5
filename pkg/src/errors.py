"""
Exception hierarchy for spellkit.

Every error raised on purpose by the library derives from SpellkitError so the
CLI can map it to an exit code (see exit_code_for).
"""

from typing import Optional


class SpellkitError(Exception):
    """Base class for all spellkit errors"""


class InvalidArgumentError(SpellkitError, ValueError):
    """A parameter or input lies outside the domain of the operation"""


class InsufficientDataError(InvalidArgumentError):
    """The sample is too small for the requested operation"""


class DataError(SpellkitError):
    """Malformed input data (bad row, non-monotone dates, empty file)"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NonConvergenceError(SpellkitError, ArithmeticError):
    """A series or optimizer did not reach its tolerance within the term cap"""

    def __init__(self, message: str, partial_sum: float = float("nan"), bound: float = float("nan")):
        self.partial_sum = partial_sum
        self.bound = bound
        super().__init__(f"{message} (partial sum {partial_sum:.6g}, tail bound {bound:.3g})")


class NumericalDegeneracyError(SpellkitError, ArithmeticError):
    """A derivation hit a numerically degenerate value (e.g. p_it(1) close to 1)"""


class InconsistentFitsError(SpellkitError):
    """Nested fits whose log-likelihoods contradict the nesting"""


# Exit codes used by main.py
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the CLI exit code"""
    if isinstance(exc, (DataError, InsufficientDataError)):
        return EXIT_DATA
    if isinstance(exc, (NonConvergenceError, NumericalDegeneracyError, InconsistentFitsError)):
        return EXIT_NUMERICAL
    return EXIT_USAGE
