"""
Polarization Operators Module
Stokes and hidden optical-polarization operators, uncertainty bounds,
IOP / IHOP indices, mode-basis transforms and Glauber correlation functions
"""
import csv
import cmath
import itertools
import logging
import math
from dataclasses import dataclass, asdict, field
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from config import (
    ALGEBRA_TOLERANCE,
    FACTORIZATION_ORDER,
    FLOAT_FORMAT,
    GAMMA_TOLERANCE,
    HERMITIAN_TOLERANCE,
    UNCERTAINTY_TOLERANCE,
)
from errors import (
    ConsistencyError,
    CutoffError,
    FamilyError,
    InvalidAmplitudeError,
    SpaceMismatchError,
    ZeroDenominatorError,
)
from fock_core import (
    AmplitudeLike,
    FockSpace,
    OperatorMatrix,
    StateVector,
    as_complex,
    commutator,
    expectation,
    interior_deviation,
    ladder_set,
    variance,
)

logger = logging.getLogger(__name__)


class OperatorFamily(Enum):
    """Operator quads built by this module"""
    STOKES = "stokes"
    HIDDEN = "hidden"


class FactorizationKind(Enum):
    """Correlation-function factorization criteria"""
    POLARIZED = "polarized"
    HOPS = "hops"


def wrap_phase(angle: float) -> float:
    """Map an angle into (-pi, pi]"""
    wrapped = math.remainder(angle, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


@dataclass(frozen=True, eq=False)
class OperatorQuad:
    """Four Hermitian operators (o0, o1, o2, o3) of one family"""
    o0: OperatorMatrix
    o1: OperatorMatrix
    o2: OperatorMatrix
    o3: OperatorMatrix
    family: OperatorFamily
    phase_phi: float = 0.0

    def __post_init__(self):
        members = self.as_tuple()
        space = self.o0.space
        for op in members:
            if op.space != space:
                raise SpaceMismatchError("operator quad mixes Fock spaces")
            if not op.hermitian_hint:
                raise ConsistencyError("operator quad members must be Hermitian")
        # S0 (stokes) or H1 (hidden) commutes with the other three exactly
        central = self.o0 if self.family is OperatorFamily.STOKES else self.o1
        for op in members:
            deviation = _max_abs(commutator(central, op).entries)
            if deviation >= HERMITIAN_TOLERANCE:
                raise ConsistencyError(
                    f"{self.family.value} quad: central operator fails to commute ({deviation:.3e})"
                )

    @property
    def space(self) -> FockSpace:
        return self.o0.space

    def as_tuple(self) -> Tuple[OperatorMatrix, OperatorMatrix, OperatorMatrix, OperatorMatrix]:
        return (self.o0, self.o1, self.o2, self.o3)

    def __iter__(self):
        return iter(self.as_tuple())


@dataclass(frozen=True)
class PolarizationIndices:
    """IOP p = alpha_y / alpha_x and IHOP p_h = alpha_y / conj(alpha_x)"""
    iop: complex
    ihop: complex

    @property
    def iop_magnitude(self) -> float:
        return abs(self.iop)

    @property
    def iop_phase(self) -> float:
        return wrap_phase(cmath.phase(self.iop))

    @property
    def ihop_magnitude(self) -> float:
        return abs(self.ihop)

    @property
    def delta_h(self) -> float:
        return wrap_phase(cmath.phase(self.ihop))

    @property
    def chi_h(self) -> float:
        """Poincare polar angle with |p_h| = tan(chi_h / 2)"""
        return 2.0 * math.atan(self.ihop_magnitude)

    def to_dict(self) -> Dict[str, float]:
        return {
            'iop_real': self.iop.real,
            'iop_imag': self.iop.imag,
            'ihop_real': self.ihop.real,
            'ihop_imag': self.ihop.imag,
            'ihop_magnitude': self.ihop_magnitude,
            'delta_h': self.delta_h,
            'chi_h': self.chi_h,
        }


@dataclass
class UncertaintyBounds:
    """Right-hand sides of the hidden-operator uncertainty products"""
    b_02: float  # |<H3>|
    b_23: float  # |<1 + H0>|
    b_30: float  # |<H2>|

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass
class UncertaintyReport:
    """Variances, bounds and products of the three hidden uncertainty relations"""
    variances: Tuple[float, float, float, float]
    bounds: UncertaintyBounds
    products: Dict[str, float]
    margins: Dict[str, float]
    holds: bool

    def to_dict(self) -> Dict[str, object]:
        return {
            'variances': list(self.variances),
            'bounds': self.bounds.to_dict(),
            'products': dict(self.products),
            'margins': dict(self.margins),
            'holds': self.holds,
        }


@dataclass(frozen=True)
class BasisVector:
    """Complex unit vector e = eps_x e_x + eps_y e_y"""
    eps_x: complex
    eps_y: complex

    def __post_init__(self):
        eps_x, eps_y = complex(self.eps_x), complex(self.eps_y)
        norm = abs(eps_x) ** 2 + abs(eps_y) ** 2
        if not math.isfinite(norm) or abs(norm - 1.0) >= 1e-12:
            raise InvalidAmplitudeError(f"basis vector must be unit length, |e|^2 = {norm!r}")
        object.__setattr__(self, 'eps_x', eps_x)
        object.__setattr__(self, 'eps_y', eps_y)

    @property
    def perp(self) -> Tuple[complex, complex]:
        """Components of the orthogonal complement e_perp"""
        return (-self.eps_y.conjugate(), self.eps_x.conjugate())

    def perp_vector(self) -> 'BasisVector':
        return BasisVector(*self.perp)

    def overlap(self, other: 'BasisVector') -> complex:
        """conj(self) . other"""
        return self.eps_x.conjugate() * other.eps_x + self.eps_y.conjugate() * other.eps_y

    @classmethod
    def linear_x(cls) -> 'BasisVector':
        return cls(1.0, 0.0)

    @classmethod
    def linear_y(cls) -> 'BasisVector':
        return cls(0.0, 1.0)

    @classmethod
    def diagonal(cls) -> 'BasisVector':
        return cls(1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0))

    @classmethod
    def from_poincare(cls, chi: float, delta: float) -> 'BasisVector':
        """Unit vector (cos(chi/2), sin(chi/2) e^{i delta})"""
        return cls(math.cos(chi / 2.0), math.sin(chi / 2.0) * cmath.exp(1j * delta))


@dataclass
class FactorizationRow:
    """One exponent tuple of a factorization check"""
    exponents: Tuple[int, int, int, int]
    gamma: complex
    reference: complex
    measured_ratio: Optional[complex]
    derived_factor: complex
    printed_factor: complex
    derived_deviation: float
    printed_deviation: float

    def to_dict(self) -> Dict[str, object]:
        m_x, m_y, n_x, n_y = self.exponents
        ratio = self.measured_ratio
        return {
            'm_x': m_x, 'm_y': m_y, 'n_x': n_x, 'n_y': n_y,
            'gamma_real': self.gamma.real, 'gamma_imag': self.gamma.imag,
            'reference_real': self.reference.real, 'reference_imag': self.reference.imag,
            'ratio_real': None if ratio is None else ratio.real,
            'ratio_imag': None if ratio is None else ratio.imag,
            'derived_real': self.derived_factor.real, 'derived_imag': self.derived_factor.imag,
            'printed_real': self.printed_factor.real, 'printed_imag': self.printed_factor.imag,
            'derived_deviation': self.derived_deviation,
            'printed_deviation': self.printed_deviation,
        }


@dataclass
class FactorizationReport:
    """Measured correlation ratios against derived and printed factors"""
    kind: FactorizationKind
    index: complex
    max_order: int
    tolerance: float
    rows: List[FactorizationRow] = field(default_factory=list)

    @property
    def max_derived_deviation(self) -> float:
        return max((row.derived_deviation for row in self.rows), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_derived_deviation <= self.tolerance

    @property
    def printed_mismatches(self) -> List[FactorizationRow]:
        return [row for row in self.rows if row.printed_deviation > self.tolerance]

    def to_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        rows = [row.to_dict() for row in self.rows]
        with open(path, 'w', newline='', encoding='utf-8') as f:
            writer = csv.DictWriter(f, fieldnames=list(rows[0].keys()) if rows else ['m_x'])
            writer.writeheader()
            for row in rows:
                writer.writerow({key: _format_cell(value) for key, value in row.items()})
        return path


@dataclass
class CommutatorCheck:
    """Measured operator relation on the interior subspace"""
    name: str
    printed_relation: str
    measured_relation: str
    deviation: float
    printed_deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.deviation < self.tolerance

    @property
    def matches_printed(self) -> bool:
        return self.printed_deviation < self.tolerance

    def to_dict(self) -> Dict[str, object]:
        data = asdict(self)
        data['passed'] = self.passed
        data['matches_printed'] = self.matches_printed
        return data


def _format_cell(value) -> str:
    if value is None:
        return ''
    if isinstance(value, float):
        return format(value, FLOAT_FORMAT)
    return str(value)


def _max_abs(entries: np.ndarray) -> float:
    return float(np.max(np.abs(entries))) if entries.size else 0.0


@lru_cache(maxsize=None)
def stokes_operators(space: FockSpace) -> OperatorQuad:
    """S0,1 = n_y +/- n_x; S2 + i S3 = 2 a_y^dagger a_x"""
    a_x, a_x_dag, a_y, a_y_dag = ladder_set(space)
    n_x = a_x_dag.entries @ a_x.entries
    n_y = a_y_dag.entries @ a_y.entries
    raising = a_y_dag.entries @ a_x.entries
    lowering = raising.conj().T
    return OperatorQuad(
        o0=OperatorMatrix(space, n_y + n_x, hermitian_hint=True),
        o1=OperatorMatrix(space, n_y - n_x, hermitian_hint=True),
        o2=OperatorMatrix(space, raising + lowering, hermitian_hint=True),
        o3=OperatorMatrix(space, -1j * (raising - lowering), hermitian_hint=True),
        family=OperatorFamily.STOKES,
    )


@lru_cache(maxsize=None)
def _hidden_operators(space: FockSpace, phi: float) -> OperatorQuad:
    a_x, a_x_dag, a_y, a_y_dag = ladder_set(space)
    n_x = a_x_dag.entries @ a_x.entries
    n_y = a_y_dag.entries @ a_y.entries
    pair = cmath.exp(2j * phi) * (a_y.entries @ a_x.entries)
    pair_dag = pair.conj().T
    return OperatorQuad(
        o0=OperatorMatrix(space, n_y + n_x, hermitian_hint=True),
        o1=OperatorMatrix(space, n_y - n_x, hermitian_hint=True),
        o2=OperatorMatrix(space, pair + pair_dag, hermitian_hint=True),
        o3=OperatorMatrix(space, -1j * (pair - pair_dag), hermitian_hint=True),
        family=OperatorFamily.HIDDEN,
        phase_phi=phi,
    )


def hidden_operators(space: FockSpace, phi: float = 0.0) -> OperatorQuad:
    """H0,1 = n_y +/- n_x; H2 + i H3 = 2 e^{2i phi} a_y a_x.

    phi is the free-field phase; in the rotating frame it defaults to 0.
    """
    return _hidden_operators(space, float(phi))


def _require_hidden(quad: OperatorQuad):
    if quad.family is not OperatorFamily.HIDDEN:
        raise FamilyError(f"hidden operator quad required, got {quad.family.value}")


def uncertainty_bounds(state: StateVector, quad: OperatorQuad) -> UncertaintyBounds:
    """|<H3>|, |<1 + H0>|, |<H2>|"""
    _require_hidden(quad)
    h0 = expectation(state, quad.o0).real
    h2 = expectation(state, quad.o2).real
    h3 = expectation(state, quad.o3).real
    return UncertaintyBounds(b_02=abs(h3), b_23=abs(1.0 + h0), b_30=abs(h2))


def uncertainty_products_hold(state: StateVector, quad: OperatorQuad) -> Tuple[bool, UncertaintyReport]:
    """Check var(H0)var(H2) >= <H3>^2, var(H2)var(H3) >= <1+H0>^2, var(H3)var(H0) >= <H2>^2"""
    _require_hidden(quad)
    bounds = uncertainty_bounds(state, quad)
    v0, v1, v2, v3 = (variance(state, op) for op in quad)
    products = {'h0_h2': v0 * v2, 'h2_h3': v2 * v3, 'h3_h0': v3 * v0}
    margins = {
        'h0_h2': products['h0_h2'] - bounds.b_02 ** 2,
        'h2_h3': products['h2_h3'] - bounds.b_23 ** 2,
        'h3_h0': products['h3_h0'] - bounds.b_30 ** 2,
    }
    holds = all(
        margin >= -UNCERTAINTY_TOLERANCE * max(1.0, products[key])
        for key, margin in margins.items()
    )
    report = UncertaintyReport((v0, v1, v2, v3), bounds, products, margins, holds)
    if not holds:
        logger.warning("uncertainty product violated: %s", margins)
    return holds, report


def iop_of(alpha_x: AmplitudeLike, alpha_y: AmplitudeLike) -> complex:
    """Index of polarization p = alpha_y / alpha_x"""
    ax, ay = as_complex(alpha_x), as_complex(alpha_y)
    if ax == 0:
        raise ZeroDenominatorError("IOP undefined for alpha_x = 0")
    return ay / ax


def ihop_of(alpha_x: AmplitudeLike, alpha_y: AmplitudeLike) -> Tuple[complex, float, float]:
    """Index of hidden polarization p_h = alpha_y / conj(alpha_x), with (|p_h|, Delta_h)"""
    ax, ay = as_complex(alpha_x), as_complex(alpha_y)
    if ax == 0:
        raise ZeroDenominatorError("IHOP undefined for alpha_x = 0")
    p_h = ay / ax.conjugate()
    return p_h, abs(p_h), wrap_phase(cmath.phase(p_h))


def polarization_indices(alpha_x: AmplitudeLike, alpha_y: AmplitudeLike) -> PolarizationIndices:
    return PolarizationIndices(iop=iop_of(alpha_x, alpha_y), ihop=ihop_of(alpha_x, alpha_y)[0])


def transform_basis(space: FockSpace, e: BasisVector) -> Tuple[OperatorMatrix, OperatorMatrix]:
    """(a_e, a_e_perp) with a_e = conj(eps_x) a_x + conj(eps_y) a_y"""
    a_x, _, a_y, _ = ladder_set(space)
    perp_x, perp_y = e.perp
    a_e = e.eps_x.conjugate() * a_x.entries + e.eps_y.conjugate() * a_y.entries
    a_perp = perp_x.conjugate() * a_x.entries + perp_y.conjugate() * a_y.entries
    return OperatorMatrix(space, a_e), OperatorMatrix(space, a_perp)


def _lowered(state: StateVector, n_x: int, n_y: int) -> np.ndarray:
    """a_x^{n_x} a_y^{n_y} |psi> by repeated application"""
    a_x, _, a_y, _ = ladder_set(state.space)
    vector = state.amplitudes
    for _ in range(n_y):
        vector = a_y.entries @ vector
    for _ in range(n_x):
        vector = a_x.entries @ vector
    return vector


def glauber_gamma(state: StateVector, m_x: int, m_y: int, n_x: int, n_y: int) -> complex:
    """Tr[rho a_x^dagger^{m_x} a_y^dagger^{m_y} a_x^{n_x} a_y^{n_y}] in photon-number units"""
    if min(m_x, m_y, n_x, n_y) < 0:
        raise ValueError("correlation orders must be nonnegative")
    n_max = state.space.n_max
    if m_x + n_x > n_max or m_y + n_y > n_max:
        raise CutoffError(
            f"orders ({m_x},{m_y},{n_x},{n_y}) exceed the ordering headroom of n_max={n_max}"
        )
    left = _lowered(state, m_x, m_y)
    right = _lowered(state, n_x, n_y)
    return complex(np.vdot(left, right))


def _exponent_tuples(max_order: int):
    for m_x, m_y, n_x, n_y in itertools.product(range(max_order + 1), repeat=4):
        if m_x + m_y <= max_order and n_x + n_y <= max_order:
            yield m_x, m_y, n_x, n_y


def _derived_factor(kind: FactorizationKind, index: complex, exponents, phase_ratio: complex) -> complex:
    m_x, m_y, n_x, n_y = exponents
    factor = index.conjugate() ** m_y * index ** n_y
    if kind is FactorizationKind.HOPS:
        # alpha_y = p_h conj(alpha_x) leaves (conj(alpha_x)/alpha_x)^{n_y - m_y} behind
        factor *= phase_ratio ** (n_y - m_y)
    return factor


def _printed_factor(kind: FactorizationKind, index: complex, exponents) -> complex:
    m_x, m_y, n_x, n_y = exponents
    if kind is FactorizationKind.POLARIZED:
        return index.conjugate() ** m_y * index ** m_x
    return index.conjugate() ** m_y * index ** n_x


def factorization_check(state: StateVector, index: complex, kind: Union[FactorizationKind, str],
                        max_order: int = FACTORIZATION_ORDER) -> FactorizationReport:
    """Compare every Gamma^{(m_x,m_y,n_x,n_y)} with factor * Gamma^{(M,0,N,0)}"""
    kind = FactorizationKind(kind)
    index = complex(index)
    if 2 * max_order > state.space.n_max:
        raise CutoffError(f"max_order={max_order} needs n_max >= {2 * max_order}")

    phase_ratio = 1.0 + 0j
    if kind is FactorizationKind.HOPS:
        mean_x = expectation(state, ladder_set(state.space)[0])
        if abs(mean_x) > 0.0:
            phase_ratio = mean_x.conjugate() / mean_x

    report = FactorizationReport(kind=kind, index=index, max_order=max_order, tolerance=GAMMA_TOLERANCE)
    for exponents in _exponent_tuples(max_order):
        m_x, m_y, n_x, n_y = exponents
        gamma = glauber_gamma(state, m_x, m_y, n_x, n_y)
        reference = glauber_gamma(state, m_x + m_y, 0, n_x + n_y, 0)
        derived = _derived_factor(kind, index, exponents, phase_ratio)
        printed = _printed_factor(kind, index, exponents)
        scale = max(1.0, abs(reference))
        ratio = gamma / reference if abs(reference) > GAMMA_TOLERANCE else None
        report.rows.append(FactorizationRow(
            exponents=exponents,
            gamma=gamma,
            reference=reference,
            measured_ratio=ratio,
            derived_factor=derived,
            printed_factor=printed,
            derived_deviation=abs(gamma - derived * reference) / scale,
            printed_deviation=abs(gamma - printed * reference) / scale,
        ))
    if report.printed_mismatches:
        logger.info("%s factorization: %d tuples disagree with the printed exponents",
                    kind.value, len(report.printed_mismatches))
    return report


def _relation_check(name: str, measured: OperatorMatrix, candidates: Dict[str, OperatorMatrix],
                    printed_key: str) -> CommutatorCheck:
    """Pick the candidate relation with the smallest interior deviation"""
    deviations = {relation: interior_deviation(measured, expected) for relation, expected in candidates.items()}
    best = min(deviations, key=deviations.get)
    return CommutatorCheck(
        name=name,
        printed_relation=printed_key,
        measured_relation=best,
        deviation=deviations[best],
        printed_deviation=deviations[printed_key],
        tolerance=ALGEBRA_TOLERANCE,
    )


def commutation_suite(space: FockSpace, phi: float = 0.0) -> List[CommutatorCheck]:
    """Hidden-operator and Stokes commutation relations on the interior subspace"""
    h0, h1, h2, h3 = hidden_operators(space, phi)
    s0, s1, s2, s3 = stokes_operators(space)
    identity = space.identity()
    zero = identity * 0.0
    one_plus_h0 = identity + h0

    checks = [
        _relation_check('[H1,H0]', commutator(h1, h0), {'0': zero}, '0'),
        _relation_check('[H1,H2]', commutator(h1, h2), {'0': zero}, '0'),
        _relation_check('[H1,H3]', commutator(h1, h3), {'0': zero}, '0'),
        _relation_check('[H0,H2]', commutator(h0, h2), {'2iH3': 2j * h3, '-2iH3': -2j * h3}, '2iH3'),
        _relation_check('[H0,H3]', commutator(h0, h3), {'2iH2': 2j * h2, '-2iH2': -2j * h2}, '2iH2'),
        _relation_check('[H2,H3]', commutator(h2, h3),
                        {'2i(1+H0)': 2j * one_plus_h0, '-2i(1+H0)': -2j * one_plus_h0}, '2i(1+H0)'),
        _relation_check('H^2-H0^2', (h1 @ h1) + (h2 @ h2) + (h3 @ h3) - (h0 @ h0),
                        {'2(1+H0)': 2.0 * one_plus_h0}, '2(1+H0)'),
        _relation_check('[S0,S1]', commutator(s0, s1), {'0': zero}, '0'),
        _relation_check('[S0,S2]', commutator(s0, s2), {'0': zero}, '0'),
        _relation_check('[S0,S3]', commutator(s0, s3), {'0': zero}, '0'),
        _relation_check('[S1,S2]', commutator(s1, s2), {'2iS3': 2j * s3, '-2iS3': -2j * s3}, '2iS3'),
        _relation_check('[S2,S3]', commutator(s2, s3), {'2iS1': 2j * s1, '-2iS1': -2j * s1}, '2iS1'),
        _relation_check('[S3,S1]', commutator(s3, s1), {'2iS2': 2j * s2, '-2iS2': -2j * s2}, '2iS2'),
    ]
    for check in checks:
        if not check.matches_printed:
            logger.info("%s measured as %s (printed %s)", check.name, check.measured_relation, check.printed_relation)
    return checks
