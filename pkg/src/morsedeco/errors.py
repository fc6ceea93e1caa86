"""Exception hierarchy shared across the package."""


class MorsedecoError(Exception):
    """Base class for all package-specific failures."""


class InvalidParamsError(MorsedecoError, ValueError):
    """A physical parameter is out of its valid range."""


class NoBoundStatesError(InvalidParamsError):
    """The potential is too shallow to support a bound state."""


class QuadratureAccuracyError(MorsedecoError):
    """The quadrature rule failed its orthonormality validation."""


class ExcessiveTruncationError(MorsedecoError):
    """Coherent-state weight above the bound manifold exceeds tolerance."""


class NumericalError(MorsedecoError):
    """A numerical procedure failed (overflow, instability, divergence)."""


class StepInstabilityError(NumericalError):
    """Master-equation integration drifted beyond the trace tolerance."""


class FitDivergedError(NumericalError):
    """Nonlinear least-squares refinement failed to converge."""


class InvariantViolationError(MorsedecoError):
    """A physical invariant check (trace, Hermiticity, positivity) failed."""


class PeakNotFoundError(MorsedecoError):
    """No extremum of the expected sign in the requested search window."""


class ConfigError(MorsedecoError, ValueError):
    """Run configuration is missing, malformed, or inconsistent."""
