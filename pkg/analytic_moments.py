"""
Analytic Moments Module
Closed-form hidden moments, variances, squeezing function, degree of hidden
polarization and critical time, each with a Fock-space oracle counterpart
"""
import cmath
import logging
import math
from dataclasses import dataclass, asdict, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy.optimize import bisect

from config import (
    DEFAULT_N_MAX,
    ONSET_BELOW_THRESHOLD,
    ONSET_BISECTION_TOL,
    ONSET_KT_MAX,
    ONSET_KT_MIN,
    ONSET_SAMPLES,
    SQUEEZING_MARGIN,
)
from dynamics import BogoliubovCoeffs, bogoliubov, evolve_state
from errors import (
    ConsistencyError,
    InvalidAmplitudeError,
    NoCrossingError,
    RangeGuardError,
    ZeroDenominatorError,
)
from fock_core import AmplitudeLike, StateVector, coherent_state, expectation, make_fock_space, variance
from polarization_ops import hidden_operators, ihop_of, wrap_phase

logger = logging.getLogger(__name__)


class VarianceSource(Enum):
    """Where hidden variances come from"""
    CLOSED_FORM = "closed_form"  # printed formulas, verbatim
    DERIVED = "derived"  # Bogoliubov derivation (var H3 constant +1)
    ORACLE = "oracle"  # truncated Fock-space evolution


class ThresholdForm(Enum):
    """Critical-time expression"""
    DERIVED = "derived"
    PRINTED = "printed"


@dataclass(frozen=True)
class HopsInput:
    """Bi-modal coherent input described by |alpha_x|^2, |p_h| and Delta_h"""
    ax_sq: float
    ph_mag: float
    delta_h: float

    def __post_init__(self):
        for name in ('ax_sq', 'ph_mag', 'delta_h'):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InvalidAmplitudeError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.ax_sq < 0.0:
            raise InvalidAmplitudeError(f"ax_sq must be nonnegative, got {self.ax_sq}")
        if self.ph_mag < 0.0:
            raise InvalidAmplitudeError(f"ph_mag must be nonnegative, got {self.ph_mag}")
        object.__setattr__(self, 'delta_h', wrap_phase(self.delta_h))

    @property
    def ihop(self) -> complex:
        return self.ph_mag * cmath.exp(1j * self.delta_h)

    @property
    def total_photons(self) -> float:
        """N = |alpha_x|^2 (1 + |p_h|^2)"""
        return self.ax_sq * (1.0 + self.ph_mag ** 2)

    @property
    def pair_amplitude(self) -> float:
        """2 |alpha_x|^2 |p_h|"""
        return 2.0 * self.ax_sq * self.ph_mag

    def amplitudes(self, zeta: float = 0.0) -> Tuple[complex, complex]:
        """alpha_x = sqrt(ax_sq) e^{i(Delta_h/2 + zeta)}, alpha_y = p_h conj(alpha_x)"""
        alpha_x = math.sqrt(self.ax_sq) * cmath.exp(1j * (self.delta_h / 2.0 + zeta))
        return alpha_x, self.ihop * alpha_x.conjugate()

    @classmethod
    def from_amplitudes(cls, alpha_x: AmplitudeLike, alpha_y: AmplitudeLike) -> 'HopsInput':
        p_h, magnitude, delta_h = ihop_of(alpha_x, alpha_y)
        return cls(ax_sq=abs(complex(alpha_x)) ** 2, ph_mag=magnitude, delta_h=delta_h)

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'HopsInput':
        return cls(ax_sq=data['ax_sq'], ph_mag=data['ph_mag'], delta_h=data['delta_h'])


@dataclass(frozen=True)
class HiddenMoments:
    """Expectations h0..h3 of the hidden operators"""
    h0: float
    h1: float
    h2: float
    h3: float

    def __post_init__(self):
        slack = 1e-9 * max(1.0, abs(self.h0))
        if self.h0 < -slack or self.h0 < abs(self.h1) - slack:
            raise ConsistencyError(f"hidden moments violate h0 >= |h1| >= 0: {self.as_tuple()}")

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.h0, self.h1, self.h2, self.h3)

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class HiddenVariances:
    """Variances v0..v3 of the hidden operators and their provenance"""
    v0: float
    v1: float
    v2: float
    v3: float
    source: VarianceSource

    def __post_init__(self):
        if self.source is VarianceSource.ORACLE and min(self.as_tuple()) < 0.0:
            raise ConsistencyError(f"oracle variances must be nonnegative: {self.as_tuple()}")

    @property
    def anomalous(self) -> bool:
        """True when a closed-form value is negative"""
        return min(self.as_tuple()) < 0.0

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.v0, self.v1, self.v2, self.v3)

    def to_dict(self) -> Dict[str, Any]:
        return {'v0': self.v0, 'v1': self.v1, 'v2': self.v2, 'v3': self.v3,
                'source': self.source.value, 'anomalous': self.anomalous}


@dataclass
class SqueezingReport:
    """Squeezing function, its verdict and the six uncertainty margins"""
    sq: float
    squeezed_h2: bool
    inequality_margins: Dict[str, float]
    variance_source: VarianceSource
    decided: bool = True
    consistent: bool = True
    notes: list = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'sq': self.sq,
            'squeezed_h2': self.squeezed_h2,
            'inequality_margins': dict(self.inequality_margins),
            'variance_source': self.variance_source.value,
            'decided': self.decided,
            'consistent': self.consistent,
            'notes': list(self.notes),
        }


def hidden_moments(inp: HopsInput, kt: float) -> HiddenMoments:
    """Closed-form h0..h3 at interaction time kt"""
    c = bogoliubov(kt)
    n = inp.total_photons
    u = inp.pair_amplitude
    sin_d, cos_d = math.sin(inp.delta_h), math.cos(inp.delta_h)
    return HiddenMoments(
        h0=n * c.c4 - u * c.s4 * sin_d + 2.0 * c.s2 ** 2,
        h1=inp.ax_sq * (inp.ph_mag ** 2 - 1.0),
        h2=u * cos_d,
        h3=u * c.c4 * sin_d - (1.0 + n) * c.s4,
    )


def oracle_state(inp: HopsInput, kt: float, n_max: int = DEFAULT_N_MAX, zeta: float = 0.0) -> StateVector:
    """Evolved truncated coherent state of the input"""
    space = make_fock_space(n_max)
    alpha_x, alpha_y = inp.amplitudes(zeta)
    return evolve_state(coherent_state(space, alpha_x, alpha_y), kt)


def oracle_moments(inp: HopsInput, kt: float, n_max: int = DEFAULT_N_MAX, zeta: float = 0.0,
                   state: Optional[StateVector] = None) -> HiddenMoments:
    """h0..h3 measured on the evolved Fock-space state"""
    state = state if state is not None else oracle_state(inp, kt, n_max, zeta)
    quad = hidden_operators(state.space)
    return HiddenMoments(*(expectation(state, op).real for op in quad))


def _variance_core(inp: HopsInput, c: BogoliubovCoeffs) -> float:
    """N C(8) - 2|alpha_x|^2 |p_h| S(8) sin(Delta_h) + S(4)^2"""
    return inp.total_photons * c.c8 - inp.pair_amplitude * c.s8 * math.sin(inp.delta_h) + c.s4 ** 2


def hidden_variances(inp: HopsInput, kt: float, source=VarianceSource.CLOSED_FORM,
                     n_max: int = DEFAULT_N_MAX, zeta: float = 0.0,
                     state: Optional[StateVector] = None) -> HiddenVariances:
    """v0..v3 from the printed closed forms, the derivation, or the oracle"""
    source = VarianceSource(source)
    if source is VarianceSource.ORACLE:
        state = state if state is not None else oracle_state(inp, kt, n_max, zeta)
        quad = hidden_operators(state.space)
        return HiddenVariances(*(variance(state, op) for op in quad), source=source)

    c = bogoliubov(kt)
    core = _variance_core(inp, c)
    n = inp.total_photons
    v3 = core - 1.0 if source is VarianceSource.CLOSED_FORM else core + 1.0
    result = HiddenVariances(v0=core, v1=n, v2=1.0 + n, v3=v3, source=source)
    if result.anomalous:
        logger.warning("closed-form variance is negative for %s at kt=%s: %s", inp, kt, result.as_tuple())
    return result


def inequality_margins(moments: HiddenMoments, variances: HiddenVariances) -> Dict[str, float]:
    """Variance minus bound for each of the six squeezing inequalities (negative = squeezed)"""
    bound_h3 = abs(moments.h3)
    bound_h0 = abs(1.0 + moments.h0)
    bound_h2 = abs(moments.h2)
    return {
        'h0_vs_h3': variances.v0 - bound_h3,
        'h2_vs_h3': variances.v2 - bound_h3,
        'h2_vs_1_plus_h0': variances.v2 - bound_h0,
        'h3_vs_1_plus_h0': variances.v3 - bound_h0,
        'h3_vs_h2': variances.v3 - bound_h2,
        'h0_vs_h2': variances.v0 - bound_h2,
    }


def squeezing_function(inp: HopsInput, kt: float) -> float:
    """Sq = |C(4) - 2 S(4) sin(Delta_h) / (|p_h| + |p_h|^-1 (1 + |alpha_x|^-2))|"""
    c = bogoliubov(kt)
    if inp.ax_sq == 0.0 or inp.ph_mag == 0.0:
        # correction term vanishes in both limits
        return abs(c.c4)
    denominator = inp.ph_mag + (1.0 + 1.0 / inp.ax_sq) / inp.ph_mag
    return abs(c.c4 - 2.0 * c.s4 * math.sin(inp.delta_h) / denominator)


def squeezing_report(inp: HopsInput, kt: float, source=VarianceSource.ORACLE,
                     n_max: int = DEFAULT_N_MAX, zeta: float = 0.0) -> SqueezingReport:
    """Sq verdict checked against the measured var(H2) < |1 + h0| inequality"""
    source = VarianceSource(source)
    sq = squeezing_function(inp, kt)
    if source is VarianceSource.ORACLE:
        state = oracle_state(inp, kt, n_max, zeta)
        moments = oracle_moments(inp, kt, state=state)
        variances = hidden_variances(inp, kt, source, state=state)
    else:
        moments = hidden_moments(inp, kt)
        variances = hidden_variances(inp, kt, source)
    margins = inequality_margins(moments, variances)

    report = SqueezingReport(sq=sq, squeezed_h2=sq > 1.0, inequality_margins=margins, variance_source=source)
    report.decided = abs(sq - 1.0) > SQUEEZING_MARGIN
    measured_squeezed = margins['h2_vs_1_plus_h0'] < 0.0
    if report.decided and measured_squeezed != report.squeezed_h2:
        report.consistent = False
        report.notes.append(
            f"Sq={sq:.12g} disagrees with var(H2) - |1+h0| = {margins['h2_vs_1_plus_h0']:.3e}"
        )
        logger.warning("squeezing verdict inconsistent for %s at kt=%s", inp, kt)
    return report


def degree_hidden(inp: HopsInput, kt: float) -> float:
    """sqrt(h1^2 + h2^2 + h3^2) / h0"""
    moments = hidden_moments(inp, kt)
    if moments.h0 <= 0.0:
        raise ZeroDenominatorError(f"degree of hidden polarization undefined: h0={moments.h0!r} at kt={kt}")
    return math.hypot(moments.h1, moments.h2, moments.h3) / moments.h0


def _check_threshold_input(inp: HopsInput, k: float):
    if inp.ax_sq <= 0.0 or inp.ph_mag <= 0.0:
        raise ZeroDenominatorError(f"critical time needs ax_sq > 0 and ph_mag > 0, got {inp}")
    if not math.isfinite(k) or k <= 0.0:
        raise RangeGuardError(f"coupling k must be positive, got {k!r}")


def critical_time(inp: HopsInput, k: float = 1.0, form=ThresholdForm.DERIVED) -> Optional[float]:
    """Time t0 where the degree of hidden polarization crosses 1, or None if it exceeds 1 at once.

    The derived form solves tanh(2 k t0) = 2|p_h| sin(Delta_h) / (|alpha_x|^-2 + 1 + |p_h|^2);
    the printed form has |p_h| sin(Delta_h) / (2 (...)) inside atanh.
    """
    form = ThresholdForm(form)
    _check_threshold_input(inp, k)
    sin_d = math.sin(inp.delta_h)
    if sin_d <= 0.0:
        return None
    spread = 1.0 / inp.ax_sq + 1.0 + inp.ph_mag ** 2
    if form is ThresholdForm.DERIVED:
        argument = 2.0 * inp.ph_mag * sin_d / spread
    else:
        argument = inp.ph_mag * sin_d / (2.0 * spread)
    return math.atanh(argument) / (2.0 * k)


def onset_time_numeric(inp: HopsInput, k: float = 1.0) -> float:
    """Bisection root of degree_hidden(kt) = 1 on kt in (0, ONSET_KT_MAX], returned as a time"""
    _check_threshold_input(inp, k)

    def excess(kt: float) -> float:
        return degree_hidden(inp, kt) - 1.0

    samples = np.logspace(math.log10(ONSET_KT_MIN), math.log10(ONSET_KT_MAX), ONSET_SAMPLES)
    values = [excess(kt) for kt in samples]
    below = [i for i, value in enumerate(values) if value < -ONSET_BELOW_THRESHOLD]
    if not below:
        return 0.0

    start = below[0]
    for i in range(start + 1, len(samples)):
        if values[i] >= 0.0 and values[i - 1] < 0.0:
            if values[i] == 0.0:
                return float(samples[i]) / k
            root = bisect(excess, samples[i - 1], samples[i], xtol=ONSET_BISECTION_TOL)
            logger.debug("onset for %s at kt=%.12g", inp, root)
            return float(root) / k
    raise NoCrossingError(f"degree stays below 1 on kt in ({ONSET_KT_MIN}, {ONSET_KT_MAX}] for {inp}")
