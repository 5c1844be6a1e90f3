"""Shared exception types."""
from __future__ import annotations

__all__ = ["EvaluationError", "NotSneAdmissibleError"]


class EvaluationError(RuntimeError):
    """A loss or derivative evaluation produced a non-finite or invalid value."""

    def __init__(self, message: str, coordinate: int | None = None):
        super().__init__(message)
        self.coordinate = coordinate


class NotSneAdmissibleError(ValueError):
    """The game Hessian fails a stable-equilibrium requirement."""

    def __init__(self, message: str, failed_check: str):
        super().__init__(message)
        self.failed_check = failed_check
