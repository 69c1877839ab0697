class ToolkitFailure(Exception):
    """Implementation of failures raised by pauliplane."""

    def __init__(self, *args, **kwargs):
        """Create a new toolkit failure."""
        Exception.__init__(self, *args, **kwargs)


class DomainError(ToolkitFailure):
    """Thrown when an argument lies outside the domain of an operation, e.g. at a singular point."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)


class AdmissibilityError(DomainError):
    """Thrown when physical parameters violate a named admissibility condition."""

    def __init__(self, *args, condition: str = "", **kwargs):
        super().__init__(*args, **kwargs)
        self.condition = condition

    def __str__(self):
        message = super().__str__()
        if self.condition:
            return "%s (violated condition: %s)" % (message, self.condition)
        return message


class NoRealRootError(DomainError):
    """Thrown when a quadratic profile equation has no real root at the requested radius."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)


class InvalidRegimeError(ToolkitFailure):
    """Thrown when operator constants fit none of the condition sets of the reduced system."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)


class MissingDerivativeError(ToolkitFailure):
    """Thrown when a function lacks the derivatives an operation needs and no fallback applies."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)


class ConvergenceFailure(ToolkitFailure):
    """Thrown when a convergence monitor reports insufficient resolution."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)


class SpecialFunctionError(ToolkitFailure):
    """Thrown when a special function evaluation does not produce a finite value."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)


class ResidualDiscrepancy(ToolkitFailure):
    """Thrown when no candidate closed form satisfies its differential equation."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)


class ConfigError(ToolkitFailure):
    """Thrown for unknown or malformed configuration keys."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
