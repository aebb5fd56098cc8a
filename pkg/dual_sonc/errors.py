class DualSoncError(Exception):
    """Base class for every error raised by this package."""


class InstanceError(DualSoncError, ValueError):
    """Raised when an instance cannot be parsed or is structurally invalid."""


class VertexConditionError(DualSoncError):
    """Raised when a vertex of the Newton polytope carries a negative coefficient."""

    def __init__(self, violations):
        self.violations = tuple(violations)
        super().__init__(
            'negative coefficient at vertex exponent(s): '
            + ', '.join(str(list(v)) for v in self.violations)
        )


class NumericalBreakdownError(DualSoncError):
    """Raised when the simplex method exceeds its iteration cap."""


class CircuitError(DualSoncError, ValueError):
    "Raised when circuit preconditions do not hold."


class OracleBudgetError(DualSoncError):
    "Raised when the sampling oracle is asked for more than its budget."


class RelaxationUnboundedError(DualSoncError):
    """Raised when the relaxed bound program is unbounded for the chosen weight."""
