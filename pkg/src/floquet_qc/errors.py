"""Exception hierarchy for the toolkit.

Every domain-specific failure derives from :class:`FloquetQCError` so callers
(and the CLI) can distinguish configuration problems from numerical failures:

* configuration errors  -> :class:`ConfigError` and its subclasses
  (:class:`InvalidEta`, :class:`MissingOmega`) map to CLI exit code 2;
* numerical failures    -> everything else maps to CLI exit code 3.
"""

from __future__ import annotations

import math


class FloquetQCError(Exception):
    """Base class for all toolkit errors."""


# ---------------------------------------------------------------------------
# configuration / validation errors (CLI exit code 2)
# ---------------------------------------------------------------------------


class ConfigError(FloquetQCError):
    """A config file could not be parsed or fails validation.

    ``key`` names the offending config key when one is known.
    """

    def __init__(self, message: str, key: str | None = None):
        self.key = key
        super().__init__(message if key is None else f"{message} (key `{key}`)")


class InvalidEta(ConfigError):
    """The impurity-like parameter eta of model M5 must satisfy 0 < eta != 1."""

    def __init__(self, eta: float):
        self.eta = eta
        super().__init__(
            f"InvalidEta: eta must be positive and different from 1, got {eta!r}"
        )


class MissingOmega(ConfigError):
    """A drive frequency omega is required (rotating frame / validation runs)."""

    def __init__(self, message: str = "drive.omega is required for this operation"):
        super().__init__(f"MissingOmega: {message}")


# ---------------------------------------------------------------------------
# numerical failures (CLI exit code 3)
# ---------------------------------------------------------------------------


class NumericalError(FloquetQCError):
    """Base class for failures of the numerical contracts."""


class SingularPotential(NumericalError):
    """An onsite potential hit (numerically) a pole of its defining function."""

    def __init__(self, model_id: str, site: int, magnitude: float):
        self.model_id = model_id
        self.site = site
        self.magnitude = magnitude
        super().__init__(
            f"SingularPotential: {model_id} onsite potential singular at site "
            f"n={site} (denominator magnitude {magnitude:.3e} < 1e-12)"
        )


class HoppingZero(NumericalError):
    """The Bessel-dressed hopping J*J0(K/omega) vanished.

    The Lyapunov exponent diverges in this limit; ``saturation_value`` carries
    the flagged finite stand-in ln(|V| / 1e-15) so callers can report a value
    instead of overflowing silently.
    """

    def __init__(self, V: float):
        self.saturation_value = float("inf") if V == 0 else math.log(abs(V) / 1e-15)
        self.is_infinite = True
        super().__init__(
            "HoppingZero: effective hopping J*J0(K/omega) is zero; Lyapunov "
            f"exponent is +inf (saturation value {self.saturation_value:.6g})"
        )


class UnsupportedModel(NumericalError):
    """The requested operation is not defined for this model."""


class StepTooLarge(NumericalError):
    """A time step violates ||H||*dt bounds for the exponential stepper."""


class SingularMatrix(NumericalError):
    """LU factorization met a pivot below 1e-300; determinant phase undefined."""


class NoConvergence(NumericalError):
    """The QR eigenvalue iteration did not converge within its sweep cap."""


class BaseOnSpectrum(NumericalError):
    """The winding base energy coincides with an eigenvalue; winding undefined."""


class NonIntegerWinding(NumericalError):
    """Winding failed to quantize even at the maximum theta refinement."""


class ZeroVector(NumericalError):
    """A state vector with (numerically) zero norm cannot be normalized."""


class BranchCut(NumericalError):
    """A closed-form quasienergy curve was evaluated at a singular argument."""
