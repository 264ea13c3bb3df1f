"""Exception types shared across the package.

The CLI maps these onto exit codes: invalid input -> 2, incomplete
solver or candidate search -> 3.
"""

from __future__ import annotations


class GameInputError(ValueError):
    """Malformed or out-of-contract input: bad shapes, ranges, or values."""


class GameFormatError(GameInputError):
    """A game document failed to parse; ``key`` names the offending field."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


class SolverIncompleteError(RuntimeError):
    """Support enumeration exhausted without a verified equilibrium.

    This signals numerical degeneracy, not nonexistence.  ``best_candidate``
    holds the profile with the smallest maximum deviation gap seen, and
    ``best_gap`` that gap (``inf`` when no support produced any candidate).
    """

    def __init__(self, message: str, best_candidate=None, best_gap: float = float("inf")):
        super().__init__(message)
        self.best_candidate = best_candidate
        self.best_gap = best_gap


class WorseSearchIncompleteError(RuntimeError):
    """Candidate search kept reporting an empty Worse set, but the subgame
    jump it implies failed equilibrium verification even after budget
    escalation.  ``partial_path`` holds the steps built so far."""

    def __init__(self, message: str, partial_path=None):
        super().__init__(message)
        self.partial_path = partial_path
