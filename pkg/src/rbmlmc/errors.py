"""Shared exception types."""


class FeasibilityError(ValueError):
    """An exact enumeration or family size exceeds its hard cap."""
