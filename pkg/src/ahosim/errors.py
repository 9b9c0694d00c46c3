"""Exception hierarchy shared by all simulator modules."""


class AhosimError(Exception):
    """Base class for all simulator errors."""


class InvalidStateError(AhosimError):
    """State vector or density matrix violates a structural requirement."""


class InvalidParameterError(AhosimError):
    """Physical or numerical parameter outside its admissible range."""


class TruncationError(AhosimError):
    """Fock truncation too small for the requested state or run."""


class StepSizeError(AhosimError):
    """Time step violates a stability guard or alignment constraint."""


class DivergenceError(AhosimError):
    """Integration produced NaN/Inf or an unbounded amplitude."""


class NoSectionError(AhosimError):
    """Poincare section requested for a run without periodic modulation."""


class ConfigError(AhosimError):
    """Malformed or inconsistent run configuration."""


class ToleranceError(AhosimError):
    """A validation run exceeded its stated tolerance."""
