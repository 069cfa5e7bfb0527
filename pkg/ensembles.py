"""
Ensembles Module
Classical and phase-averaged quantum ensembles of HOPS and polarized light,
evaluated for Stokes and hidden parameters
"""
import csv
import cmath
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Tuple, Union

import numpy as np

from config import (
    ENSEMBLE_N_MAX,
    FLOAT_FORMAT,
    MIN_PHASE_SAMPLES,
    MONTE_CARLO_SAMPLES,
    MONTE_CARLO_SEED,
)
from errors import InvalidAmplitudeError, InvalidConfigError, ZeroDenominatorError
from fock_core import FockSpace, OperatorMatrix, StateVector, coherent_state, expectation, make_fock_space
from polarization_ops import BasisVector, hidden_operators, stokes_operators, wrap_phase

logger = logging.getLogger(__name__)

# Draws amplitudes A0 for Monte-Carlo members: sampler(rng, count) -> array
AmplitudeSampler = Callable[[np.random.Generator, int], np.ndarray]


class ParameterEstimator(Enum):
    """How ensemble averages are taken"""
    EXACT_PHASE_AVERAGE = "exact_phase_average"
    MONTE_CARLO = "monte_carlo"


def _check_angles(chi: float, delta: float, a0: float) -> Tuple[float, float, float]:
    chi, delta, a0 = float(chi), float(delta), float(a0)
    if not all(math.isfinite(v) for v in (chi, delta, a0)):
        raise InvalidAmplitudeError(f"ensemble parameters must be finite: a0={a0}, chi={chi}, delta={delta}")
    if a0 < 0.0:
        raise InvalidAmplitudeError(f"a0 must be nonnegative, got {a0}")
    if not 0.0 <= chi <= math.pi:
        raise InvalidAmplitudeError(f"polar angle must lie in [0, pi], got {chi}")
    return chi, wrap_phase(delta), a0


@dataclass(frozen=True)
class HopsEnsembleSpec:
    """Fixed A0, chi_h, Delta_h and a random phase difference zeta"""
    a0: float
    chi_h: float
    delta_h: float
    n_phases: int = 64
    basis: BasisVector = field(default_factory=BasisVector.linear_x)

    def __post_init__(self):
        chi, delta, a0 = _check_angles(self.chi_h, self.delta_h, self.a0)
        object.__setattr__(self, 'chi_h', chi)
        object.__setattr__(self, 'delta_h', delta)
        object.__setattr__(self, 'a0', a0)

    def field_components(self, zeta, a0=None) -> Tuple[np.ndarray, np.ndarray]:
        """(A_x, A_y) for phase difference zeta; A0 may be overridden per sample"""
        a0 = self.a0 if a0 is None else a0
        zeta = np.asarray(zeta, dtype=float)
        a_e = a0 * math.cos(self.chi_h / 2.0) * np.exp(1j * (zeta + self.delta_h / 2.0))
        a_perp = a0 * math.sin(self.chi_h / 2.0) * np.exp(1j * (-zeta + self.delta_h / 2.0))
        perp_x, perp_y = self.basis.perp
        return (a_e * self.basis.eps_x + a_perp * perp_x,
                a_e * self.basis.eps_y + a_perp * perp_y)


@dataclass(frozen=True)
class PolarizedFieldSpec:
    """Fixed A0 e0 with a random common phase phi"""
    a0: float
    chi0: float
    delta0: float
    n_phases: int = 64

    def __post_init__(self):
        chi, delta, a0 = _check_angles(self.chi0, self.delta0, self.a0)
        object.__setattr__(self, 'chi0', chi)
        object.__setattr__(self, 'delta0', delta)
        object.__setattr__(self, 'a0', a0)

    @property
    def direction(self) -> BasisVector:
        """e0 = (cos(chi0/2), sin(chi0/2) e^{i Delta0})"""
        return BasisVector.from_poincare(self.chi0, self.delta0)

    def field_components(self, phi, a0=None) -> Tuple[np.ndarray, np.ndarray]:
        a0 = self.a0 if a0 is None else a0
        phase = a0 * np.exp(1j * np.asarray(phi, dtype=float))
        e0 = self.direction
        return phase * e0.eps_x, phase * e0.eps_y


EnsembleSpec = Union[HopsEnsembleSpec, PolarizedFieldSpec]


@dataclass
class EnsembleParameters:
    """Ensemble-averaged Stokes (s0..s3) and hidden (h0..h3) parameters"""
    s0: float
    s1: float
    s2: float
    s3: float
    h0: float
    h1: float
    h2: float
    h3: float
    estimator: ParameterEstimator
    n_samples: Optional[int] = None
    path: str = "classical"

    @property
    def stokes(self) -> Tuple[float, float, float, float]:
        return (self.s0, self.s1, self.s2, self.s3)

    @property
    def hidden(self) -> Tuple[float, float, float, float]:
        return (self.h0, self.h1, self.h2, self.h3)

    @property
    def stokes_residual(self) -> float:
        """max(|s1|, |s2|, |s3|)"""
        return max(abs(self.s1), abs(self.s2), abs(self.s3))

    @property
    def hidden_pair_magnitude(self) -> float:
        """sqrt(h2^2 + h3^2)"""
        return math.hypot(self.h2, self.h3)

    def to_dict(self) -> Dict[str, object]:
        return {
            's0': self.s0, 's1': self.s1, 's2': self.s2, 's3': self.s3,
            'h0': self.h0, 'h1': self.h1, 'h2': self.h2, 'h3': self.h3,
            'estimator': self.estimator.value, 'n_samples': self.n_samples, 'path': self.path,
        }


def _phase_grid(n_phases: int) -> np.ndarray:
    if isinstance(n_phases, bool) or int(n_phases) != n_phases or n_phases < MIN_PHASE_SAMPLES:
        raise InvalidConfigError(
            f"phase averaging needs at least {MIN_PHASE_SAMPLES} samples, got {n_phases!r}"
        )
    return 2.0 * math.pi * np.arange(int(n_phases)) / int(n_phases)


def _parameters_from_components(a_x: np.ndarray, a_y: np.ndarray, estimator: ParameterEstimator,
                                n_samples: int) -> EnsembleParameters:
    ix = np.mean(np.abs(a_x) ** 2)
    iy = np.mean(np.abs(a_y) ** 2)
    stokes_pair = 2.0 * np.mean(np.conj(a_y) * a_x)
    hidden_pair = 2.0 * np.mean(a_y * a_x)
    return EnsembleParameters(
        s0=float(iy + ix), s1=float(iy - ix),
        s2=float(stokes_pair.real), s3=float(stokes_pair.imag),
        h0=float(iy + ix), h1=float(iy - ix),
        h2=float(hidden_pair.real), h3=float(hidden_pair.imag),
        estimator=estimator, n_samples=n_samples,
    )


def classical_parameters(spec: EnsembleSpec, estimator=ParameterEstimator.EXACT_PHASE_AVERAGE,
                         n_samples: int = MONTE_CARLO_SAMPLES, seed: int = MONTE_CARLO_SEED,
                         amplitude_sampler: Optional[AmplitudeSampler] = None) -> EnsembleParameters:
    """Ensemble averages of the classical field over its random phase"""
    estimator = ParameterEstimator(estimator)
    if estimator is ParameterEstimator.EXACT_PHASE_AVERAGE:
        phases = _phase_grid(spec.n_phases)
        a_x, a_y = spec.field_components(phases)
        return _parameters_from_components(a_x, a_y, estimator, len(phases))

    if n_samples < 1:
        raise InvalidConfigError(f"Monte-Carlo needs at least one sample, got {n_samples}")
    rng = np.random.default_rng(seed)
    phases = rng.uniform(0.0, 2.0 * math.pi, size=n_samples)
    amplitudes = None
    if amplitude_sampler is not None:
        amplitudes = np.asarray(amplitude_sampler(rng, n_samples), dtype=float)
        if amplitudes.shape != (n_samples,) or np.any(amplitudes < 0.0):
            raise InvalidAmplitudeError("amplitude sampler must return n_samples nonnegative values")
    a_x, a_y = spec.field_components(phases, amplitudes)
    logger.debug("Monte-Carlo ensemble: %d samples, seed %d", n_samples, seed)
    return _parameters_from_components(a_x, a_y, estimator, n_samples)


def quantum_phase_averaged_state(space: FockSpace, spec: EnsembleSpec) -> List[Tuple[float, StateVector]]:
    """Equally weighted coherent members |A_x(zeta_m), A_y(zeta_m)> of the phase-averaged mixture"""
    phases = _phase_grid(spec.n_phases)
    a_x, a_y = spec.field_components(phases)
    weight = 1.0 / len(phases)
    return [(weight, coherent_state(space, complex(x), complex(y))) for x, y in zip(a_x, a_y)]


def ensemble_expectation(members: Iterable[Tuple[float, StateVector]], op: OperatorMatrix) -> complex:
    """sum_m w_m <psi_m|op|psi_m>"""
    return sum((weight * expectation(state, op) for weight, state in members), 0j)


def quantum_parameters(space: FockSpace, spec: EnsembleSpec) -> EnsembleParameters:
    """Stokes and hidden parameters of the phase-averaged coherent mixture"""
    members = quantum_phase_averaged_state(space, spec)
    stokes = [ensemble_expectation(members, op).real for op in stokes_operators(space)]
    hidden = [ensemble_expectation(members, op).real for op in hidden_operators(space)]
    return EnsembleParameters(
        *stokes, *hidden,
        estimator=ParameterEstimator.EXACT_PHASE_AVERAGE,
        n_samples=len(members),
        path="quantum",
    )


def iop_ihop_in_basis(spec: PolarizedFieldSpec, e: BasisVector) -> complex:
    """IOP of the polarized field in the basis (e, e_perp): (e_perp* . e0) / (e* . e0)"""
    e0 = spec.direction
    along = e.overlap(e0)
    if abs(along) < 1e-12:
        raise ZeroDenominatorError("light lies entirely along e_perp; IOP undefined in this basis")
    return e.perp_vector().overlap(e0) / along


def ihop_of_spec(spec: HopsEnsembleSpec) -> complex:
    """IHOP in the ensemble's own basis: tan(chi_h / 2) e^{i Delta_h}"""
    if math.cos(spec.chi_h / 2.0) < 1e-12:
        raise ZeroDenominatorError("IHOP undefined for chi_h = pi")
    return math.tan(spec.chi_h / 2.0) * cmath.exp(1j * spec.delta_h)


def mirrored_polarized_spec(spec: HopsEnsembleSpec) -> PolarizedFieldSpec:
    """Polarized ensemble with the same Poincare angles"""
    return PolarizedFieldSpec(a0=spec.a0, chi0=spec.chi_h, delta0=spec.delta_h, n_phases=spec.n_phases)


def demo_rows(spec: HopsEnsembleSpec, n_max: int = ENSEMBLE_N_MAX) -> List[Dict[str, object]]:
    """Classical and quantum parameters of the HOPS ensemble and its polarized mirror"""
    space = make_fock_space(n_max)
    rows = []
    for name, ensemble in (('hops', spec), ('polarized', mirrored_polarized_spec(spec))):
        for path, params in (('classical', classical_parameters(ensemble)),
                             ('quantum', quantum_parameters(space, ensemble))):
            row = {'ensemble': name, 'path': path}
            row.update({key: params.to_dict()[key] for key in ('s0', 's1', 's2', 's3', 'h0', 'h1', 'h2', 'h3')})
            rows.append(row)
    return rows


def write_parameters_csv(rows: List[Dict[str, object]], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fieldnames = ['ensemble', 'path', 's0', 's1', 's2', 's3', 'h0', 'h1', 'h2', 'h3']
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.DictWriter(f, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow({key: format(value, FLOAT_FORMAT) if isinstance(value, float) else value
                             for key, value in row.items()})
    return path
