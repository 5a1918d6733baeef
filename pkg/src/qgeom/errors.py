"""Exception types shared across the package."""


class UsageError(ValueError):
    """Caller violated an operation precondition (dimension mismatch, bad flag value)."""


class DomainError(ValueError):
    """Evaluation requested outside a schedule's time domain or at a non-differentiable point."""


class ConfigError(ValueError):
    """Invalid configuration document. Carries the JSON path of the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class NumericError(RuntimeError):
    """A numerical contract was violated (residue too large, solver failure)."""


class DegenerateStateError(ValueError):
    """State is (numerically) an eigenstate: sigma_H below the degeneracy threshold."""
