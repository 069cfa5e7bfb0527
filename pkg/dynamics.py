"""
Dynamics Module
Degenerate parametric amplification in the rotating frame: hyperbolic
Bogoliubov coefficients, mean-amplitude evolution, the evolved IHOP and the
Heisenberg-picture ladder operators
"""
import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from config import (
    BOGOLIUBOV_TOLERANCE,
    KT_LIMIT,
    MOBIUS_POLE_TOLERANCE,
    ORACLE_COUPLING,
)
from errors import ConsistencyError, MobiusPoleError, RangeGuardError, ZeroDenominatorError
from fock_core import (
    AmplitudeLike,
    FockSpace,
    OperatorMatrix,
    StateVector,
    as_complex,
    evolve_oracle,
    ladder_set,
    mean_amplitudes,
)

logger = logging.getLogger(__name__)


def _check_kt(kt: float) -> float:
    kt = float(kt)
    if not math.isfinite(kt) or abs(kt) > KT_LIMIT:
        raise RangeGuardError(f"|kt| must not exceed {KT_LIMIT}, got {kt!r}")
    return kt


@dataclass(frozen=True)
class BogoliubovCoeffs:
    """Hyperbolic coefficients C(2l) = cosh(2l kt), S(2l) = sinh(2l kt)"""
    kt: float
    c2: float
    s2: float
    c4: float
    s4: float
    t2: float

    def __post_init__(self):
        if abs(self.c2 * self.c2 - self.s2 * self.s2 - 1.0) > BOGOLIUBOV_TOLERANCE * self.c2 * self.c2:
            raise ConsistencyError(f"cosh^2 - sinh^2 != 1 at kt={self.kt}")
        if abs(self.c4 - (2.0 * self.c2 * self.c2 - 1.0)) > BOGOLIUBOV_TOLERANCE * self.c4:
            raise ConsistencyError(f"C(4) != 2 C(2)^2 - 1 at kt={self.kt}")
        if abs(self.t2 - self.s2 / self.c2) > BOGOLIUBOV_TOLERANCE:
            raise ConsistencyError(f"T(2) != S(2) / C(2) at kt={self.kt}")

    def c(self, l: int) -> float:
        """C(2l)"""
        return math.cosh(2 * l * self.kt)

    def s(self, l: int) -> float:
        """S(2l)"""
        return math.sinh(2 * l * self.kt)

    @property
    def c8(self) -> float:
        return self.c(4)

    @property
    def s8(self) -> float:
        return self.s(4)


def bogoliubov(kt: float) -> BogoliubovCoeffs:
    """Coefficients for interaction time kt, |kt| <= KT_LIMIT"""
    kt = _check_kt(kt)
    return BogoliubovCoeffs(
        kt=kt,
        c2=math.cosh(2.0 * kt),
        s2=math.sinh(2.0 * kt),
        c4=math.cosh(4.0 * kt),
        s4=math.sinh(4.0 * kt),
        t2=math.tanh(2.0 * kt),
    )


@dataclass(frozen=True)
class EvolvedAmplitudes:
    """Rotating-frame mean amplitudes <a_x(t)>, <a_y(t)>"""
    alpha_x_t: complex
    alpha_y_t: complex
    kt: float = 0.0

    @property
    def ihop(self) -> complex:
        """First-moment IHOP <a_y(t)> / conj(<a_x(t)>)"""
        if self.alpha_x_t == 0:
            raise ZeroDenominatorError(f"evolved x-amplitude vanishes at kt={self.kt}")
        return self.alpha_y_t / self.alpha_x_t.conjugate()

    def as_tuple(self) -> Tuple[complex, complex]:
        return (self.alpha_x_t, self.alpha_y_t)


def evolve_amplitudes(alpha_x: AmplitudeLike, alpha_y: AmplitudeLike, kt: float) -> EvolvedAmplitudes:
    """alpha_x(t) = C(2) alpha_x - i S(2) conj(alpha_y), and x <-> y"""
    coeffs = bogoliubov(kt)
    ax, ay = as_complex(alpha_x), as_complex(alpha_y)
    return EvolvedAmplitudes(
        alpha_x_t=coeffs.c2 * ax - 1j * coeffs.s2 * ay.conjugate(),
        alpha_y_t=coeffs.c2 * ay - 1j * coeffs.s2 * ax.conjugate(),
        kt=coeffs.kt,
    )


def ihop_evolve(p_h: complex, kt: float) -> complex:
    """Mobius map p_h(t) = (p_h - i T(2)) / (1 + i p_h T(2))"""
    p_h = complex(p_h)
    t2 = bogoliubov(kt).t2
    denominator = 1.0 + 1j * p_h * t2
    if abs(denominator) <= MOBIUS_POLE_TOLERANCE:
        raise MobiusPoleError(p_h, float(kt), denominator)
    return (p_h - 1j * t2) / denominator


def heisenberg_pair(space: FockSpace, kt: float) -> Tuple[OperatorMatrix, OperatorMatrix]:
    """(A_x(t), A_y(t)) with A_x(t) = C(2) a_x - i S(2) a_y^dagger"""
    coeffs = bogoliubov(kt)
    a_x, a_x_dag, a_y, a_y_dag = ladder_set(space)
    if coeffs.kt == 0.0:
        return a_x, a_y
    return (
        coeffs.c2 * a_x + (-1j * coeffs.s2) * a_y_dag,
        coeffs.c2 * a_y + (-1j * coeffs.s2) * a_x_dag,
    )


def evolve_state(state: StateVector, kt: float) -> StateVector:
    """Schrodinger-picture evolution in units k = 1 (g t = 2 kt)"""
    kt = _check_kt(kt)
    return evolve_oracle(state, ORACLE_COUPLING, kt)


def oracle_amplitudes(state: StateVector) -> EvolvedAmplitudes:
    """Mean amplitudes measured on a Fock-space state"""
    return EvolvedAmplitudes(*mean_amplitudes(state))


def oracle_ihop(state: StateVector) -> complex:
    """<a_y> / conj(<a_x>) measured on a Fock-space state"""
    return oracle_amplitudes(state).ihop


def round_trip_error(alpha_x: AmplitudeLike, alpha_y: AmplitudeLike, kt: float) -> float:
    """Max deviation after evolving by kt and back by -kt"""
    forward = evolve_amplitudes(alpha_x, alpha_y, kt)
    back = evolve_amplitudes(forward.alpha_x_t, forward.alpha_y_t, -kt)
    original = np.array([as_complex(alpha_x), as_complex(alpha_y)])
    return float(np.max(np.abs(np.array(back.as_tuple()) - original)))
