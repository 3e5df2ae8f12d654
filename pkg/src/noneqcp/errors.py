"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where a formula is defined."""


class TabulationError(DomainError):
    """A tabulated quantity was requested outside its data range."""


class PoleError(ArithmeticError):
    """Evaluation hit an exact pole (a lossless resonance, or a bare atomic line).

    Callers that integrate across such poles must use the principal-value
    routines instead of sampling the integrand there.
    """

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class ConvergenceError(RuntimeError):
    """A quadrature or series did not reach the requested tolerance."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})

    def __str__(self):
        base = super().__str__()
        if not self.diagnostics:
            return base
        extra = ", ".join(f"{k}={v!r}" for k, v in self.diagnostics.items())
        return f"{base} ({extra})"


class ConfigError(ValueError):
    """A run configuration failed validation."""
