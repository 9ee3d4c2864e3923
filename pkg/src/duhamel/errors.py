"""Exception types raised across the package.

Everything derives from :class:`DuhamelError` so callers can catch the
whole family at once.  ``IoError`` is an alias for the builtin ``OSError``;
file-level failures propagate unchanged.
"""


class DuhamelError(Exception):
    pass


# --- grids / fields -------------------------------------------------------

class InvalidDim(DuhamelError):
    pass


class InvalidModeCount(DuhamelError):
    pass


class KindDimMismatch(DuhamelError):
    pass


class RepresentationMismatch(DuhamelError):
    pass


class GridMismatch(DuhamelError):
    pass


# --- multiplier symbols ----------------------------------------------------

class ZeroMass(DuhamelError):
    pass


class UnsupportedOnBasis(DuhamelError):
    pass


class NegativeTimeForSemigroup(DuhamelError):
    pass


class NonSkewSymbol(DuhamelError):
    pass


# --- equations -------------------------------------------------------------

class BadParams(DuhamelError):
    pass


# --- integrators -----------------------------------------------------------

class NonFiniteState(DuhamelError):
    pass


class UnsupportedEquation(DuhamelError):
    pass


class BlowUp(DuhamelError):
    """Trajectory aborted; ``step_index`` is the first offending step."""

    def __init__(self, step_index, message=""):
        self.step_index = step_index
        super().__init__(message or f"blow-up detected at step {step_index}")


# --- analysis ----------------------------------------------------------------

class ArityMismatch(DuhamelError):
    pass


class MissingSecondDerivatives(DuhamelError):
    pass


class DegenerateFit(DuhamelError):
    pass


class TooFewSamples(DuhamelError):
    pass


class NonPositiveError(DuhamelError):
    pass


# --- harness -----------------------------------------------------------------

class ReferenceDisagreement(DuhamelError):
    pass


IoError = OSError
