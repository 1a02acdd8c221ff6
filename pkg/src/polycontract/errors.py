"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or out-of-contract input (maps to CLI exit code 2)."""
