"""Shared exception types."""


class NumericalError(RuntimeError):
    """An eigensolver or root finder failed to deliver a usable result.

    Raised instead of silently propagating NaNs.
    """
