"""Exception types shared across the package.

The command line tool maps these onto exit codes: configuration problems
exit 2, resource budget refusals exit 3, numerical failures exit 4.
"""


class ContractError(ValueError):
    """An argument violates a documented precondition."""


class ConfigError(ValueError):
    """A run configuration is malformed, incomplete, or has unknown keys."""


class ResourceBudgetError(RuntimeError):
    """A requested computation exceeds a declared memory or size budget."""


class NumericalError(RuntimeError):
    """A numerical routine failed to meet its accuracy contract."""


class EmptyProjectionError(NumericalError):
    """A state projected into a symmetry sector came back with zero norm."""
