"""
Verification Suites for the HOPS simulator
Runs every closed-form vs oracle comparison over the pinned grid fixture
"""
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np

from analytic_moments import (
    HopsInput,
    ThresholdForm,
    VarianceSource,
    critical_time,
    degree_hidden,
    hidden_moments,
    hidden_variances,
    oracle_moments,
    oracle_state,
    onset_time_numeric,
    squeezing_function,
    squeezing_report,
)
from config import (
    ALGEBRA_N_MAX,
    ALGEBRA_TOLERANCE,
    DEFAULT_N_MAX,
    ENSEMBLE_N_MAX,
    GAMMA_TOLERANCE,
    GRID_FIXTURE_PATH,
    GRID_FIXTURE_VERSION,
    MONTE_CARLO_SEED,
    ORACLE_RELATIVE_TOLERANCE,
    PICTURES_N_MAX,
    UNCERTAINTY_SAMPLE_STATES,
)
from dynamics import evolve_amplitudes, evolve_state, heisenberg_pair, ihop_evolve, oracle_amplitudes
from ensembles import HopsEnsembleSpec, classical_parameters, mirrored_polarized_spec, quantum_parameters
from errors import FixtureError, HopsError
from fock_core import StateVector, coherent_state, commutator, expectation, interior_deviation, make_fock_space
from polarization_ops import (
    FactorizationKind,
    commutation_suite,
    factorization_check,
    hidden_operators,
    uncertainty_products_hold,
)
from verification_report import VerificationReport

logger = logging.getLogger(__name__)

HEISENBERG_KT = (0.1, 0.25, 0.5)
LARGE_AMPLITUDE = HopsInput(ax_sq=100.0, ph_mag=1.0, delta_h=0.0)
DEGREE_SAMPLES = 50
FACTORIZATION_POINTS = 4


@dataclass
class GridFixture:
    """Pinned (ax_sq, ph_mag, delta_h) points and interaction times"""
    version: int
    kt_values: List[float]
    points: List[HopsInput] = field(default_factory=list)
    path: str = ""

    def cases(self):
        for index, point in enumerate(self.points):
            for kt in self.kt_values:
                yield index, point, kt

    def to_dict(self) -> Dict[str, Any]:
        return {
            'version': self.version,
            'kt_values': list(self.kt_values),
            'points': [point.to_dict() for point in self.points],
        }


def load_grid_fixture(path: str = GRID_FIXTURE_PATH) -> GridFixture:
    """Read and validate the versioned grid fixture"""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except FileNotFoundError:
        raise FixtureError(f"grid fixture not found: {path}", path)
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise FixtureError(f"grid fixture unreadable: {exc}", path)

    if not isinstance(data, dict) or data.get('version') != GRID_FIXTURE_VERSION:
        raise FixtureError(f"grid fixture must be a version {GRID_FIXTURE_VERSION} object", path)
    try:
        kt_values = [float(kt) for kt in data['kt_values']]
        points = [HopsInput.from_dict(point) for point in data['points']]
    except (KeyError, TypeError, ValueError) as exc:
        raise FixtureError(f"grid fixture malformed: {exc!r}", path)
    if not kt_values or not points:
        raise FixtureError("grid fixture needs at least one point and one kt value", path)
    return GridFixture(version=data['version'], kt_values=kt_values, points=points, path=str(path))


def _case_name(index: int, point: HopsInput, kt: float = None) -> str:
    name = f"p{index:02d}(a={point.ax_sq:g},P={point.ph_mag:g},D={point.delta_h:.4f})"
    return name if kt is None else f"{name}@kt={kt:g}"


def _interior_states(n_max: int, count: int, seed: int) -> List[StateVector]:
    """Random states supported on n_x, n_y <= n_max - 1"""
    space = make_fock_space(n_max)
    rng = np.random.default_rng(seed)
    mask = space.interior_mask()
    states = []
    for _ in range(count):
        vector = np.zeros(space.dim, dtype=complex)
        size = int(mask.sum())
        vector[mask] = rng.normal(size=size) + 1j * rng.normal(size=size)
        states.append(StateVector.normalized(space, vector))
    return states


def run_algebra_suite(report: VerificationReport, n_max: int = ALGEBRA_N_MAX):
    suite = 'algebra'
    space = make_fock_space(n_max)
    for check in commutation_suite(space):
        report.add_check(suite, check.name, check.measured_relation, check.passed,
                         deviation=check.deviation, tolerance=check.tolerance)
        if not check.matches_printed:
            report.add_check(suite, check.name, f"printed {check.printed_relation}", False,
                             deviation=check.printed_deviation, tolerance=check.tolerance,
                             informational=True, note=f"measured {check.measured_relation}")

    identity = space.identity()
    for kt in HEISENBERG_KT:
        a_x_t, a_y_t = heisenberg_pair(space, kt)
        for name, op in (('A_x', a_x_t), ('A_y', a_y_t)):
            deviation = interior_deviation(commutator(op, op.adjoint()), identity)
            report.add_check(suite, f"[{name},{name}^dagger]@kt={kt:g}", '1', deviation < ALGEBRA_TOLERANCE,
                             deviation=deviation, tolerance=ALGEBRA_TOLERANCE)


def run_uncertainty_suite(report: VerificationReport, fixture: GridFixture, n_max: int):
    suite = 'uncertainty'
    quad = hidden_operators(make_fock_space(ALGEBRA_N_MAX))
    for i, state in enumerate(_interior_states(ALGEBRA_N_MAX, UNCERTAINTY_SAMPLE_STATES, MONTE_CARLO_SEED)):
        holds, result = uncertainty_products_hold(state, quad)
        report.add_check(suite, f"random{i:02d}", 'products', holds, deviation=min(result.margins.values()))

    for index, point, kt in fixture.cases():
        case = _case_name(index, point, kt)
        try:
            state = oracle_state(point, kt, n_max)
            holds, result = uncertainty_products_hold(state, hidden_operators(state.space))
            report.add_check(suite, case, 'products', holds, deviation=min(result.margins.values()))
        except HopsError as exc:
            report.add_failure(suite, case, str(exc))


def run_moment_suites(report: VerificationReport, fixture: GridFixture, n_max: int):
    """Moments, variances, var(H2) constancy, and the squeezing criterion against the oracle"""
    tol = ORACLE_RELATIVE_TOLERANCE
    for index, point in enumerate(fixture.points):
        v2_at_start = None
        for kt in fixture.kt_values:
            case = _case_name(index, point, kt)
            try:
                state = oracle_state(point, kt, n_max)
                measured = oracle_moments(point, kt, state=state)
                oracle_vars = hidden_variances(point, kt, VarianceSource.ORACLE, state=state)
            except HopsError as exc:
                report.add_failure('moments', case, str(exc))
                continue

            closed = hidden_moments(point, kt)
            for name, expected, value in zip(('h0', 'h1', 'h2', 'h3'), closed.as_tuple(), measured.as_tuple()):
                report.add('moments', case, name, expected, value, tol, relative=True)

            printed = hidden_variances(point, kt, VarianceSource.CLOSED_FORM)
            derived = hidden_variances(point, kt, VarianceSource.DERIVED)
            report.add('variances', case, 'v0', printed.v0, oracle_vars.v0, tol, relative=True)
            report.add('variances', case, 'v1', printed.v1, oracle_vars.v1, tol, relative=True)
            report.add('variances', case, 'v2', printed.v2, oracle_vars.v2, tol, relative=True)
            report.add('variances', case, 'v3 derived', derived.v3, oracle_vars.v3, tol, relative=True)
            report.add('variance_h3_printed', case, 'v3 printed', printed.v3, oracle_vars.v3, tol,
                       relative=True, informational=True,
                       note=f"printed - oracle = {printed.v3 - oracle_vars.v3:+.6g}")

            if v2_at_start is None:
                v2_at_start = oracle_vars.v2
            report.add('h2_constancy', case, 'oracle v2', v2_at_start, oracle_vars.v2, tol, relative=True)

            sq = squeezing_function(point, kt)
            closed_criterion = printed.v2 < abs(1.0 + closed.h0)
            report.add_check('squeezing', case, 'Sq>1 <=> v2<|1+h0| (closed)', (sq > 1.0) == closed_criterion
                             or abs(sq - 1.0) <= 1e-9, deviation=abs(sq - 1.0))
            try:
                verdict = squeezing_report(point, kt, VarianceSource.ORACLE, n_max)
                report.add_check('squeezing', case, 'Sq>1 <=> v2<|1+h0| (oracle)', verdict.consistent,
                                 deviation=verdict.inequality_margins['h2_vs_1_plus_h0'],
                                 note='' if verdict.decided else 'undecided: |Sq-1| <= margin')
            except HopsError as exc:
                report.add_failure('squeezing', case, str(exc))
            if kt == 0.0:
                report.add('squeezing', case, 'Sq(kt=0)', 1.0, sq, ALGEBRA_TOLERANCE)

            if index < FACTORIZATION_POINTS and kt == fixture.kt_values[-1]:
                try:
                    shifted = oracle_moments(point, kt, n_max, zeta=0.7)
                    for name, expected, value in zip(('h0', 'h1', 'h2', 'h3'), measured.as_tuple(), shifted.as_tuple()):
                        report.add('zeta_independence', case, name, expected, value, tol, relative=True)
                except HopsError as exc:
                    report.add_failure('zeta_independence', case, str(exc))

    for kt in HEISENBERG_KT:
        for delta, exponent in ((-math.pi / 2.0, 4.0), (math.pi / 2.0, -4.0)):
            point = HopsInput(LARGE_AMPLITUDE.ax_sq, LARGE_AMPLITUDE.ph_mag, delta)
            target = math.exp(exponent * kt)
            sq = squeezing_function(point, kt)
            # the e^{-4kt} limit degrades beyond kt = 0.25
            informational = exponent < 0.0 and kt > 0.25
            report.add_check('squeezing_limits', f"a=100,P=1,D={delta:+.4f}@kt={kt:g}", f"Sq vs e^{exponent:+g}kt",
                             abs(sq / target - 1.0) <= 0.02, deviation=abs(sq / target - 1.0), tolerance=0.02,
                             informational=informational)


def run_degree_suite(report: VerificationReport, fixture: GridFixture, k: float = 1.0):
    suite = 'degree'
    rng = np.random.default_rng(MONTE_CARLO_SEED)
    samples = [HopsInput(rng.uniform(0.01, 5.0), rng.uniform(0.0, 4.0), rng.uniform(-math.pi, math.pi))
               for _ in range(DEGREE_SAMPLES)]
    for i, point in enumerate(list(fixture.points) + samples):
        report.add(suite, f"input{i:02d}", 'degree(kt=0)', 1.0, degree_hidden(point, 0.0), ALGEBRA_TOLERANCE)

    vacuum = HopsInput(0.0, 0.0, 0.0)
    for kt in HEISENBERG_KT:
        report.add(suite, f"vacuum@kt={kt:g}", 'coth(2kt)', 1.0 / math.tanh(2.0 * kt),
                   degree_hidden(vacuum, kt), ALGEBRA_TOLERANCE, relative=True)

    for index, point in enumerate(fixture.points):
        case = _case_name(index, point)
        try:
            t0 = critical_time(point, k)
            onset = onset_time_numeric(point, k)
        except HopsError as exc:
            report.add_failure('critical_time', case, str(exc))
            continue
        if t0 is None:
            report.add('critical_time', case, 'onset (none expected)', 0.0, onset, ALGEBRA_TOLERANCE)
            continue
        report.add('critical_time', case, 't0 derived vs bisection', t0, onset, ORACLE_RELATIVE_TOLERANCE, relative=True)
        below = degree_hidden(point, k * t0 - 1e-4)
        above = degree_hidden(point, k * t0 + 1e-4)
        report.add_check('critical_time', case, 'degree brackets 1', below < 1.0 < above,
                         deviation=above - below)
        printed = critical_time(point, k, ThresholdForm.PRINTED)
        report.add('critical_time_printed', case, 't0 printed', printed, onset, ORACLE_RELATIVE_TOLERANCE,
                   relative=True, informational=True)


def run_ihop_suite(report: VerificationReport, fixture: GridFixture, n_max: int):
    space = make_fock_space(n_max)
    wide_space = make_fock_space(max(n_max, PICTURES_N_MAX))
    for index, point in enumerate(fixture.points):
        alpha_x, alpha_y = point.amplitudes()
        for kt in fixture.kt_values:
            case = _case_name(index, point, kt)
            try:
                mapped = ihop_evolve(point.ihop, kt)
                direct = evolve_amplitudes(alpha_x, alpha_y, kt).ihop
                report.add_check('ihop', case, 'Mobius vs mean amplitudes', abs(mapped - direct) <= 1e-12 * max(1.0, abs(direct)),
                                 deviation=abs(mapped - direct), tolerance=1e-12)
                composed = ihop_evolve(ihop_evolve(point.ihop, kt / 2.0), kt / 2.0)
                report.add_check('ihop', case, 'composition', abs(composed - mapped) <= 1e-12 * max(1.0, abs(mapped)),
                                 deviation=abs(composed - mapped), tolerance=1e-12)
            except HopsError as exc:
                report.add_failure('ihop', case, str(exc))

        # A(t) acts on the unevolved state, so only the evolved state needs the wide space
        for kt in HEISENBERG_KT:
            case = _case_name(index, point, kt)
            try:
                initial = coherent_state(space, alpha_x, alpha_y)
                evolved = evolve_state(coherent_state(wide_space, alpha_x, alpha_y), kt)
                schrodinger = oracle_amplitudes(evolved)
                a_x_t, a_y_t = heisenberg_pair(space, kt)
                closed = evolve_amplitudes(alpha_x, alpha_y, kt)
                deviation = max(abs(schrodinger.alpha_x_t - expectation(initial, a_x_t)),
                                abs(schrodinger.alpha_y_t - expectation(initial, a_y_t)),
                                abs(schrodinger.alpha_x_t - closed.alpha_x_t),
                                abs(schrodinger.alpha_y_t - closed.alpha_y_t))
                report.add_check('pictures', case, '<a(t)> Heisenberg vs Schrodinger', deviation <= 1e-8,
                                 deviation=deviation, tolerance=1e-8)
            except HopsError as exc:
                report.add_failure('pictures', case, str(exc))


def run_factorization_suite(report: VerificationReport, fixture: GridFixture, n_max: int):
    space_cache = {}
    for index, point in enumerate(fixture.points[:FACTORIZATION_POINTS]):
        if point.ax_sq == 0.0:
            continue
        alpha_x, _ = point.amplitudes()
        for kind, alpha_y in ((FactorizationKind.POLARIZED, point.ihop * alpha_x),
                              (FactorizationKind.HOPS, point.ihop * alpha_x.conjugate())):
            case = f"{_case_name(index, point)} {kind.value}"
            try:
                space = space_cache.setdefault(n_max, make_fock_space(n_max))
                state = coherent_state(space, alpha_x, alpha_y)
                result = factorization_check(state, point.ihop, kind)
                report.add_check('factorization', case, 'derived factors', result.passed,
                                 deviation=result.max_derived_deviation, tolerance=GAMMA_TOLERANCE)
                report.add_check('factorization_printed', case, 'printed exponents', not result.printed_mismatches,
                                 deviation=max((row.printed_deviation for row in result.rows), default=0.0),
                                 tolerance=GAMMA_TOLERANCE, informational=True,
                                 note=f"{len(result.printed_mismatches)} of {len(result.rows)} tuples differ")
            except HopsError as exc:
                report.add_failure('factorization', case, str(exc))


def run_ensemble_suite(report: VerificationReport, n_max: int = ENSEMBLE_N_MAX):
    suite = 'ensembles'
    space = make_fock_space(n_max)
    for delta in (0.0, math.pi / 2.0):
        spec = HopsEnsembleSpec(a0=2.0, chi_h=math.pi / 2.0, delta_h=delta, n_phases=16)
        mirror = mirrored_polarized_spec(spec)
        try:
            for path, hops, polarized in (('classical', classical_parameters(spec), classical_parameters(mirror)),
                                          ('quantum', quantum_parameters(space, spec), quantum_parameters(space, mirror))):
                case = f"A0=2,chi=pi/2,D={delta:.4f} {path}"
                report.add(suite, case, 'hops max|s1,s2,s3|', 0.0, hops.stokes_residual, 1e-10)
                report.add(suite, case, 'hops |h2+ih3|', 4.0, hops.hidden_pair_magnitude, 1e-10)
                report.add(suite, case, 'hops s0-h0', 0.0, hops.s0 - hops.h0, 1e-12)
                report.add(suite, case, 'polarized |h2+ih3|', 0.0, polarized.hidden_pair_magnitude, 1e-10)
                report.add(suite, case, 'polarized |s2+is3|', 4.0, math.hypot(polarized.s2, polarized.s3), 1e-10)
        except HopsError as exc:
            report.add_failure(suite, f"D={delta:.4f}", str(exc))


def run_verification(n_max: int = DEFAULT_N_MAX, fixture: GridFixture = None, k: float = 1.0) -> VerificationReport:
    """Every suite; a case that raises becomes a failed row"""
    fixture = fixture if fixture is not None else load_grid_fixture()
    report = VerificationReport(n_max, fixture.path)
    logger.info("verification: %d points x %d kt values at n_max=%d",
                len(fixture.points), len(fixture.kt_values), n_max)

    run_algebra_suite(report)
    run_uncertainty_suite(report, fixture, n_max)
    run_moment_suites(report, fixture, n_max)
    run_degree_suite(report, fixture, k)
    run_ihop_suite(report, fixture, n_max)
    run_factorization_suite(report, fixture, n_max)
    run_ensemble_suite(report)

    for summary in report.get_suite_summaries():
        logger.info("%-24s cases=%d failures=%d max=%.3e", summary.suite, summary.cases,
                    summary.failures, summary.max_deviation)
    return report
