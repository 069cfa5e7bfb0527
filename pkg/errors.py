"""
Exception types for the HOPS simulator
Every precondition failure raised by the library derives from HopsError
"""
from typing import Optional


class HopsError(Exception):
    """Base class for all simulator errors"""


class CutoffError(HopsError, ValueError):
    """Photon-number cutoff out of range or too small for the request"""


class SpaceMismatchError(HopsError, ValueError):
    """Operands live in different Fock spaces"""


class NonHermitianError(HopsError, ValueError):
    """A Hermitian operator was required"""


class TruncationOverflowError(HopsError, RuntimeError):
    """Evolution pushed population into the cutoff shells"""

    def __init__(self, message: str, shell_mass: float):
        super().__init__(message)
        self.shell_mass = shell_mass


class StepControlError(HopsError, RuntimeError):
    """Time evolution failed the norm monitor"""


class ConsistencyError(HopsError, ArithmeticError):
    """An internal numerical invariant was violated"""


class RangeGuardError(HopsError, ValueError):
    """Interaction time or coupling outside the supported range"""


class ZeroDenominatorError(HopsError, ZeroDivisionError):
    """A ratio is undefined because its denominator vanishes"""


class MobiusPoleError(HopsError, ZeroDivisionError):
    """The evolved IHOP hits the pole of its Mobius map"""

    def __init__(self, p_h: complex, kt: float, denominator: complex):
        super().__init__(
            f"IHOP map has a pole at p_h={p_h!r}, kt={kt!r} "
            f"(|1 + i p_h T(2)| = {abs(denominator):.3e}); the evolved x-amplitude mean vanishes"
        )
        self.p_h = p_h
        self.kt = kt
        self.denominator = denominator


class FamilyError(HopsError, ValueError):
    """Operator quad of the wrong family"""


class InvalidConfigError(HopsError, ValueError):
    """Sweep configuration violates its invariants"""


class FixtureError(HopsError, ValueError):
    """Grid fixture missing or corrupted"""

    def __init__(self, message: str, path: Optional[str] = None):
        super().__init__(message)
        self.path = path


class NoCrossingError(HopsError, RuntimeError):
    """No degree = 1 crossing was found in the scanned range"""


class InvalidAmplitudeError(HopsError, ValueError):
    """Amplitude or basis vector is not finite or not normalized"""
