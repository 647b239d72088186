"""Exception types shared across the package.

The CLI maps these onto process exit codes; see cli.py.
"""


class ShiftpressError(Exception):
    """Base class for all package errors."""


class InputError(ShiftpressError):
    """Malformed word, symbol out of range, or invalid argument."""


class ConstructionError(InputError):
    """A family constructor rejected its parameters."""


class BudgetExceededError(ShiftpressError):
    """Enumeration ran out of its node budget.

    Carries the partial progress so callers can report how far the walk got.
    """

    def __init__(self, message: str, words_done: int, nodes: int, budget: int):
        super().__init__(message)
        self.words_done = words_done
        self.nodes = nodes
        self.budget = budget


class InconsistentBracketError(ShiftpressError):
    """Pressure bracket crossed (best lower bound above best upper bound).

    Almost always means the declared gap bounds are wrong for the instance.
    """

    def __init__(self, message: str, best_lo: float, best_hi: float):
        super().__init__(message)
        self.best_lo = best_lo
        self.best_hi = best_hi


class ReducibleGraphError(ShiftpressError):
    """Block graph is not strongly connected; no Perron data exists."""


class ConvergenceError(ShiftpressError):
    """Power iteration failed to reach tolerance within max_iter."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class IdentityCheckError(ShiftpressError):
    """An internal consistency identity failed beyond tolerance."""
