"""Exception types shared across the package.

The split between ``ConfigError``-like validation failures and runtime solver
failures mirrors the CLI exit-code contract (2 for bad input, 3 for a solve
that could not be completed).
"""

from __future__ import annotations


class ConfigError(ValueError):
    """Invalid configuration: bad schema, unknown keys, out-of-range values."""


class EmptyDomainError(ConfigError):
    """A domain build produced a mask with no interior node."""


class EmptyRegionError(ValueError):
    """An operation received an empty node set where a nonempty one is required."""


class ConstraintViolationError(ValueError):
    """A field violates a structural precondition (support, sign, overlap)."""


class ConvergenceError(RuntimeError):
    """Iterative solve exhausted its iteration cap.

    Carries the last residual so callers can decide whether the partial
    answer is still usable.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (last residual {residual:.3e})")
        self.residual = float(residual)


class InfeasibleError(RuntimeError):
    """The separation distance cannot be realized on the given domain."""


class SqueezedOutError(RuntimeError):
    """A partition component lost all admissible nodes during relaxation."""

    def __init__(self, component: int):
        super().__init__(f"component squeezed out: {component}")
        self.component = int(component)
