"""Exception hierarchy shared by all modules."""


class GevreyBBMError(Exception):
    """Base class for all toolkit errors."""


class InvalidInput(GevreyBBMError):
    """Argument violates a documented precondition."""


class SymmetryViolation(GevreyBBMError):
    """Spectral coefficients break Hermitian symmetry beyond tolerance."""


class OverflowRisk(GevreyBBMError):
    """Linear-scale evaluation of an exponential weight would overflow.

    Callers must switch to the log-domain norm routines instead.
    """


class BlowupDetected(GevreyBBMError):
    """A simulated coefficient became non-finite or exceeded the blowup cap."""

    def __init__(self, time, message=None):
        self.time = time
        super().__init__(message or f"non-finite state detected at t={time}")


class NoConvergence(GevreyBBMError):
    """Fixed-point iteration hit the iteration cap before the tolerance."""

    def __init__(self, message, diagnostics=None):
        self.diagnostics = diagnostics
        super().__init__(message)


class IdentityViolation(GevreyBBMError):
    """An exact polynomial identity failed; carries the counterexample."""

    def __init__(self, message, counterexample=None):
        self.counterexample = counterexample
        super().__init__(message)


class SeriesDivergence(GevreyBBMError):
    """Direct series summation showed no decay within the term budget."""


class CrossCheckFailure(GevreyBBMError):
    """Two independent evaluation routes disagreed beyond tolerance."""

    def __init__(self, message, value_a=None, value_b=None):
        self.value_a = value_a
        self.value_b = value_b
        super().__init__(message)


class SpectrumTooThin(GevreyBBMError):
    """Too few usable spectral modes for a decay-rate fit."""


class InsufficientData(GevreyBBMError):
    """Not enough usable data points for a requested fit."""


class NoFit(GevreyBBMError):
    """Every trajectory sample was rejected by the fitting policy."""
