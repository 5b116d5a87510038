"""
Custom exceptions for the Dynamic Solow toolkit.

Every error raised on purpose by the package derives from
``DynamicSolowError`` so callers (and the CLI) can map failure classes to
exit codes without catching unrelated exceptions.
"""

from __future__ import annotations

from typing import Sequence


class DynamicSolowError(Exception):
    """Base exception for all Dynamic Solow errors"""
    pass


# ============================================================================
# Parameters and configuration
# ============================================================================


class ParameterError(DynamicSolowError):
    """Raised when a model parameter or simulation setting violates a hard invariant."""

    def __init__(self, field: str, value: object, reason: str):
        self.field = field
        self.value = value
        super().__init__(f"{field}={value!r}: {reason}")


class NonPositiveTimescale(ParameterError):
    """
    Raised when a timescale (tau_y, tau_s, tau_h, tau_xi) is zero or negative.
    """
    pass


class ShareOutOfRange(ParameterError):
    """
    Raised when a share parameter (rho, lambda) lies outside the open interval (0, 1).
    """
    pass


class NegativeRate(ParameterError):
    """
    Raised when a rate is out of bounds.

    Depreciation must be strictly positive; technology growth and the
    noise amplitude must be non-negative.
    """
    pass


class InvalidSimConfig(ParameterError):
    """
    Raised when a simulation setting is inconsistent.

    Examples: dt <= 0, t_end < dt, burn_in >= t_end, an initial sentiment
    outside (-1, 1), or an unknown regime mode.
    """
    pass


class ConfigError(DynamicSolowError):
    """Raised when a configuration document cannot be parsed"""

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        self.key = key
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{message}{where}")


class UnknownKey(ConfigError):
    """Raised when a configuration document names a key the model does not define."""
    pass


class MalformedValue(ConfigError):
    """Raised when a configuration line is not ``key = value`` or the value cannot be parsed."""
    pass


# ============================================================================
# Numerics
# ============================================================================


class NumericalError(DynamicSolowError):
    """Raised when an integration or solver step breaks down"""
    pass


class NonFiniteState(NumericalError):
    """
    Raised when a state becomes non-finite or hits the exponent clamp.

    ``step`` is the integration step index at which the problem was seen,
    or None when raised from a single right-hand-side evaluation.
    """

    def __init__(self, message: str, step: int | None = None):
        self.step = step
        where = f" at step {step}" if step is not None else ""
        super().__init__(f"{message}{where}")


class NonPositiveCapital(NumericalError):
    """Raised when the level-form supply equation is evaluated at K <= 0."""
    pass


class NewtonDivergence(NumericalError):
    """
    Raised when Newton refinement of an equilibrium does not converge.

    ``root`` is the sentiment root the refinement started from.
    """

    def __init__(self, root: float, residual: float):
        self.root = root
        self.residual = residual
        super().__init__(
            f"Newton refinement from s={root:.17g} did not converge (residual {residual:.3e})"
        )


class StepTooLarge(NumericalError):
    """Raised when dt times the largest agent flip rate reaches 1."""
    pass


# ============================================================================
# Analysis
# ============================================================================


class AnalysisError(DynamicSolowError):
    """Raised when a trajectory cannot support the requested statistic"""
    pass


class WindowTooSmall(AnalysisError):
    """Raised when fewer samples than required fall inside the analysis window."""
    pass


class InsufficientCrossings(AnalysisError):
    """Raised when a series has fewer than two upward zero crossings."""
    pass


class NonUniformSampling(AnalysisError):
    """Raised when a spectral operation gets a non-uniformly sampled series."""
    pass


class WrongMode(AnalysisError):
    """Raised when a statistic is requested from a trajectory of the wrong regime mode."""
    pass


# ============================================================================
# Scenarios
# ============================================================================


class UnknownScenario(DynamicSolowError):
    """Raised when a reproduction scenario name is not registered."""

    def __init__(self, name: str, valid: Sequence[str]):
        self.name = name
        self.valid = list(valid)
        super().__init__(f"Unknown scenario '{name}'. Registered: {self.valid}")
