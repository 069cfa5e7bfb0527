"""
Fock Core Module
Truncated two-mode Fock-space linear algebra: states, operators, expectations,
variances, commutators and the exact time-evolution oracle
"""
import csv
import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Tuple, Union

import numpy as np
from scipy.linalg import expm
from scipy.sparse import csc_matrix, diags
from scipy.sparse import kron as sparse_kron
from scipy.sparse.linalg import expm_multiply
from scipy.stats import poisson

from config import (
    COHERENT_TAIL_LIMIT,
    DENSE_N_MAX_LIMIT,
    EVOLUTION_SHELL_DEPTH,
    EVOLUTION_TAIL_LIMIT,
    EXPM_SPARSE_MIN_DIM,
    FLOAT_FORMAT,
    HERMITIAN_TOLERANCE,
    MAX_COUPLING_TIME,
    N_MAX_LIMIT,
    NORM_TOLERANCE,
    VARIANCE_CLAMP,
)
from errors import (
    ConsistencyError,
    CutoffError,
    InvalidAmplitudeError,
    NonHermitianError,
    RangeGuardError,
    SpaceMismatchError,
    StepControlError,
    TruncationOverflowError,
)

logger = logging.getLogger(__name__)


class Mode(Enum):
    """Polarization modes of the linear basis"""
    X = "x"
    Y = "y"


class LadderKind(Enum):
    """Single-mode ladder operators"""
    ANNIHILATE = "annihilate"
    CREATE = "create"
    NUMBER = "number"


@dataclass(frozen=True)
class FockSpace:
    """Two-mode Fock space truncated at n_max photons per mode.

    Basis ordering is row-major in (n_x, n_y):
    index(n_x, n_y) = n_x * (n_max + 1) + n_y, i.e. the ordering of
    numpy.kron(x_operator, y_operator).
    """
    n_max: int

    def __post_init__(self):
        if isinstance(self.n_max, bool) or not isinstance(self.n_max, (int, np.integer)):
            raise CutoffError(f"n_max must be an integer, got {self.n_max!r}")
        if not 1 <= self.n_max <= N_MAX_LIMIT:
            raise CutoffError(f"n_max must lie in [1, {N_MAX_LIMIT}], got {self.n_max}")
        object.__setattr__(self, 'n_max', int(self.n_max))

    @property
    def levels(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return self.levels ** 2

    def index(self, n_x: int, n_y: int) -> int:
        """Basis index of |n_x, n_y>"""
        if not (0 <= n_x <= self.n_max and 0 <= n_y <= self.n_max):
            raise CutoffError(f"|{n_x},{n_y}> lies outside the cutoff n_max={self.n_max}")
        return n_x * self.levels + n_y

    def occupations(self) -> Tuple[np.ndarray, np.ndarray]:
        """Photon numbers (n_x, n_y) of every basis state"""
        return _occupations(self.n_max)

    def interior_mask(self) -> np.ndarray:
        """Basis states with n_x, n_y <= n_max - 1"""
        n_x, n_y = self.occupations()
        return (n_x < self.n_max) & (n_y < self.n_max)

    def edge_mask(self, depth: int = 1) -> np.ndarray:
        """Basis states within the `depth` outermost number shells of either mode"""
        n_x, n_y = self.occupations()
        threshold = self.n_max - depth + 1
        return (n_x >= threshold) | (n_y >= threshold)

    def identity(self) -> 'OperatorMatrix':
        return OperatorMatrix(self, np.eye(self.dim), hermitian_hint=True)


@lru_cache(maxsize=None)
def _occupations(n_max: int) -> Tuple[np.ndarray, np.ndarray]:
    levels = n_max + 1
    n_x, n_y = np.divmod(np.arange(levels * levels), levels)
    n_x.setflags(write=False)
    n_y.setflags(write=False)
    return n_x, n_y


def _check_same_space(first: FockSpace, second: FockSpace):
    if first != second:
        raise SpaceMismatchError(f"operands live in different spaces (n_max={first.n_max} vs {second.n_max})")


def hermitian_deviation(entries: np.ndarray) -> float:
    """Max |M - M^dagger|"""
    if entries.size == 0:
        return 0.0
    return float(np.max(np.abs(entries - entries.conj().T)))


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense matrix representation of a two-mode operator"""
    space: FockSpace
    entries: np.ndarray
    hermitian_hint: bool = False

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.shape != (self.space.dim, self.space.dim):
            raise SpaceMismatchError(
                f"matrix shape {entries.shape} does not match space dimension {self.space.dim}"
            )
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)
        if self.hermitian_hint:
            deviation = hermitian_deviation(entries)
            if deviation >= HERMITIAN_TOLERANCE:
                raise NonHermitianError(f"operator flagged Hermitian but max|M - M^dagger| = {deviation:.3e}")

    def adjoint(self) -> 'OperatorMatrix':
        return OperatorMatrix(self.space, self.entries.conj().T, self.hermitian_hint)

    def hermitian(self) -> 'OperatorMatrix':
        """Same matrix with the Hermitian hint set (validated)"""
        return OperatorMatrix(self.space, self.entries, hermitian_hint=True)

    def apply(self, vector: np.ndarray) -> np.ndarray:
        return self.entries @ vector

    def interior(self) -> np.ndarray:
        """Projection onto the interior subspace n_x, n_y <= n_max - 1"""
        mask = self.space.interior_mask()
        return self.entries[np.ix_(mask, mask)]

    def __add__(self, other: 'OperatorMatrix') -> 'OperatorMatrix':
        _check_same_space(self.space, other.space)
        return OperatorMatrix(self.space, self.entries + other.entries)

    def __sub__(self, other: 'OperatorMatrix') -> 'OperatorMatrix':
        _check_same_space(self.space, other.space)
        return OperatorMatrix(self.space, self.entries - other.entries)

    def __mul__(self, scalar: complex) -> 'OperatorMatrix':
        return OperatorMatrix(self.space, self.entries * complex(scalar))

    __rmul__ = __mul__

    def __matmul__(self, other: 'OperatorMatrix') -> 'OperatorMatrix':
        _check_same_space(self.space, other.space)
        return OperatorMatrix(self.space, self.entries @ other.entries)

    def to_csv(self, path: Union[str, Path]) -> Path:
        """Dump the nonzero entries as (row, column, real, imaginary) rows"""
        rows, cols = np.nonzero(self.entries)
        return _write_entries(path, rows, cols, self.entries[rows, cols])


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state of the truncated space"""
    space: FockSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=complex)
        if amplitudes.shape != (self.space.dim,):
            raise SpaceMismatchError(
                f"state length {amplitudes.shape} does not match space dimension {self.space.dim}"
            )
        norm = float(np.linalg.norm(amplitudes))
        if abs(norm - 1.0) >= NORM_TOLERANCE:
            raise ConsistencyError(f"state vector is not normalized (norm = {norm!r})")
        amplitudes.setflags(write=False)
        object.__setattr__(self, 'amplitudes', amplitudes)

    @classmethod
    def normalized(cls, space: FockSpace, amplitudes: np.ndarray) -> 'StateVector':
        amplitudes = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(amplitudes)
        if norm == 0.0:
            raise ConsistencyError("cannot normalize the zero vector")
        return cls(space, amplitudes / norm)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def to_csv(self, path: Union[str, Path]) -> Path:
        """Dump the nonzero amplitudes as (index, 0, real, imaginary) rows"""
        (rows,) = np.nonzero(self.amplitudes)
        return _write_entries(path, rows, np.zeros_like(rows), self.amplitudes[rows])


@dataclass(frozen=True)
class ComplexAmplitude:
    """Coherent amplitude of one mode in photon-amplitude units"""
    value: complex
    role: str = "alpha_x"

    def __post_init__(self):
        value = complex(self.value)
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise InvalidAmplitudeError(f"{self.role} must be finite, got {self.value!r}")
        object.__setattr__(self, 'value', value)

    def __complex__(self) -> complex:
        return self.value


AmplitudeLike = Union[ComplexAmplitude, complex, float, int]


def as_complex(amplitude: AmplitudeLike) -> complex:
    """Plain complex value of an amplitude, validated for finiteness"""
    if isinstance(amplitude, ComplexAmplitude):
        return amplitude.value
    return ComplexAmplitude(amplitude).value


def _write_entries(path, rows, cols, values) -> Path:
    path = Path(path)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow(['row', 'column', 'real', 'imaginary'])
        for row, col, value in zip(rows, cols, values):
            writer.writerow([int(row), int(col), format(value.real, FLOAT_FORMAT), format(value.imag, FLOAT_FORMAT)])
    return path


def make_fock_space(n_max: int) -> FockSpace:
    """Create a truncated two-mode space"""
    space = FockSpace(n_max)
    logger.debug("Fock space n_max=%d, dim=%d", space.n_max, space.dim)
    return space


@lru_cache(maxsize=None)
def _single_mode(levels: int, kind: LadderKind) -> np.ndarray:
    lowering = np.diag(np.sqrt(np.arange(1, levels, dtype=float)), k=1)
    if kind is LadderKind.ANNIHILATE:
        single = lowering
    elif kind is LadderKind.CREATE:
        single = lowering.T.copy()
    else:
        single = np.diag(np.arange(levels, dtype=float))
    single.setflags(write=False)
    return single


def _require_dense(space: FockSpace):
    if space.n_max > DENSE_N_MAX_LIMIT:
        raise CutoffError(
            f"dense operators are limited to n_max <= {DENSE_N_MAX_LIMIT}, got {space.n_max}"
        )


@lru_cache(maxsize=None)
def _mode_operator(space: FockSpace, mode: Mode, kind: LadderKind) -> OperatorMatrix:
    _require_dense(space)
    single = _single_mode(space.levels, kind)
    identity = np.eye(space.levels)
    if mode is Mode.X:
        full = np.kron(single, identity)
    else:
        full = np.kron(identity, single)
    return OperatorMatrix(space, full, hermitian_hint=kind is LadderKind.NUMBER)


def mode_operator(space: FockSpace, mode: Union[Mode, str], kind: Union[LadderKind, str]) -> OperatorMatrix:
    """Ladder or number operator of one mode, identity on the other"""
    return _mode_operator(space, Mode(mode), LadderKind(kind))


def ladder_set(space: FockSpace) -> Tuple[OperatorMatrix, OperatorMatrix, OperatorMatrix, OperatorMatrix]:
    """(a_x, a_x^dagger, a_y, a_y^dagger)"""
    return (
        mode_operator(space, Mode.X, LadderKind.ANNIHILATE),
        mode_operator(space, Mode.X, LadderKind.CREATE),
        mode_operator(space, Mode.Y, LadderKind.ANNIHILATE),
        mode_operator(space, Mode.Y, LadderKind.CREATE),
    )


def _coherent_coefficients(alpha: complex, levels: int) -> np.ndarray:
    coefficients = np.zeros(levels, dtype=complex)
    coefficients[0] = math.exp(-abs(alpha) ** 2 / 2.0)
    for n in range(1, levels):
        coefficients[n] = coefficients[n - 1] * alpha / math.sqrt(n)
    return coefficients


def coherent_tail(alpha: AmplitudeLike, n_max: int) -> float:
    """Poisson mass of |alpha> beyond n_max photons"""
    mean = abs(as_complex(alpha)) ** 2
    if mean == 0.0:
        return 0.0
    return float(poisson.sf(n_max, mean))


def coherent_state(space: FockSpace, alpha_x: AmplitudeLike, alpha_y: AmplitudeLike) -> StateVector:
    """Normalized truncated product coherent state |alpha_x, alpha_y>"""
    amplitudes = {'alpha_x': as_complex(alpha_x), 'alpha_y': as_complex(alpha_y)}
    for role, alpha in amplitudes.items():
        tail = coherent_tail(alpha, space.n_max)
        if tail >= COHERENT_TAIL_LIMIT:
            raise CutoffError(
                f"n_max={space.n_max} too small for {role}={alpha!r}: Poisson tail {tail:.3e} "
                f">= {COHERENT_TAIL_LIMIT:.0e}"
            )
    vector = np.kron(
        _coherent_coefficients(amplitudes['alpha_x'], space.levels),
        _coherent_coefficients(amplitudes['alpha_y'], space.levels),
    )
    return StateVector.normalized(space, vector)


def fock_state(space: FockSpace, n_x: int, n_y: int) -> StateVector:
    """Number state |n_x, n_y>"""
    vector = np.zeros(space.dim, dtype=complex)
    vector[space.index(n_x, n_y)] = 1.0
    return StateVector(space, vector)


def expectation(state: StateVector, op: OperatorMatrix) -> complex:
    """<psi|M|psi>"""
    _check_same_space(state.space, op.space)
    psi = state.amplitudes
    value = complex(np.vdot(psi, op.entries @ psi))
    if op.hermitian_hint:
        if abs(value.imag) > HERMITIAN_TOLERANCE * max(1.0, abs(value.real)):
            raise ConsistencyError(f"Hermitian expectation has imaginary part {value.imag:.3e}")
        value = complex(value.real, 0.0)
    return value


def variance(state: StateVector, op: OperatorMatrix) -> float:
    """<M^2> - <M>^2 for a Hermitian M, clamped at zero within VARIANCE_CLAMP"""
    if not op.hermitian_hint:
        raise NonHermitianError("variance requires an operator flagged Hermitian")
    _check_same_space(state.space, op.space)
    psi = state.amplitudes
    applied = op.entries @ psi
    mean = float(np.vdot(psi, applied).real)
    second = float(np.vdot(applied, applied).real)
    value = second - mean * mean
    if value < 0.0:
        if value < -VARIANCE_CLAMP * max(1.0, second):
            raise ConsistencyError(f"variance is negative ({value:.3e})")
        value = 0.0
    return value


def commutator(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    """AB - BA"""
    _check_same_space(a.space, b.space)
    return OperatorMatrix(a.space, a.entries @ b.entries - b.entries @ a.entries)


def interior_deviation(op: OperatorMatrix, expected: OperatorMatrix = None) -> float:
    """Max-abs deviation of op from expected on the interior subspace"""
    if expected is None:
        difference = op.interior()
    else:
        _check_same_space(op.space, expected.space)
        difference = op.interior() - expected.interior()
    if difference.size == 0:
        return 0.0
    return float(np.max(np.abs(difference)))


@lru_cache(maxsize=None)
def interaction_hamiltonian(space: FockSpace) -> OperatorMatrix:
    """a_x a_y + a_x^dagger a_y^dagger (coupling g factored out)"""
    a_x, a_x_dag, a_y, a_y_dag = ladder_set(space)
    pair = a_x.entries @ a_y.entries
    return OperatorMatrix(space, pair + pair.conj().T, hermitian_hint=True)


@lru_cache(maxsize=None)
def _sparse_interaction(space: FockSpace) -> csc_matrix:
    lowering = diags(np.sqrt(np.arange(1, space.levels, dtype=float)), offsets=1)
    pair = sparse_kron(lowering, lowering)
    return csc_matrix(pair + pair.T)


def mean_amplitudes(state: StateVector) -> Tuple[complex, complex]:
    """(<a_x>, <a_y>) read directly from the amplitude grid psi[n_x, n_y]"""
    levels = state.space.levels
    grid = state.amplitudes.reshape(levels, levels)
    root = np.sqrt(np.arange(1, levels, dtype=float))
    mean_x = complex(np.sum(grid[:-1, :].conj() * root[:, None] * grid[1:, :]))
    mean_y = complex(np.sum(grid[:, :-1].conj() * root[None, :] * grid[:, 1:]))
    return mean_x, mean_y


def shell_mass(state: StateVector, depth: int = 1) -> float:
    """Probability in the `depth` outermost number shells of either mode"""
    return float(np.sum(state.probabilities()[state.space.edge_mask(depth)]))


def tail_mass(state: StateVector) -> float:
    """Probability in basis states with n_x = n_max or n_y = n_max"""
    return shell_mass(state, depth=1)


def evolve_oracle(state: StateVector, g: float, t: float) -> StateVector:
    """Evolve under H_I = g (a_x a_y + a_x^dagger a_y^dagger) in the rotating frame"""
    coupling_time = float(g) * float(t)
    if not math.isfinite(coupling_time) or abs(coupling_time) > MAX_COUPLING_TIME:
        raise RangeGuardError(f"|g t| must not exceed {MAX_COUPLING_TIME}, got {coupling_time!r}")
    if coupling_time == 0.0:
        return state

    space = state.space
    psi = state.amplitudes
    if space.dim < EXPM_SPARSE_MIN_DIM:
        evolved = expm(-1j * coupling_time * interaction_hamiltonian(space).entries) @ psi
    else:
        evolved = expm_multiply((-1j * coupling_time) * _sparse_interaction(space), psi)

    norm = float(np.linalg.norm(evolved))
    if not math.isfinite(norm) or abs(norm - 1.0) >= NORM_TOLERANCE:
        raise StepControlError(f"evolution lost unitarity: |psi(t)| = {norm!r} at g t = {coupling_time}")
    evolved_state = StateVector(space, evolved)

    outer = shell_mass(evolved_state, EVOLUTION_SHELL_DEPTH)
    logger.debug("evolved n_max=%d g t=%.6g norm-1=%.2e outer shells=%.2e",
                 space.n_max, coupling_time, norm - 1.0, outer)
    if outer >= EVOLUTION_TAIL_LIMIT:
        raise TruncationOverflowError(
            f"squeezing populated the cutoff shells: mass {outer:.3e} >= {EVOLUTION_TAIL_LIMIT:.0e} "
            f"(n_max={space.n_max}, g t={coupling_time})",
            outer,
        )
    return evolved_state
