"""
Tests for closed-form hidden moments, variances, squeezing and critical time
"""
import math

import pytest
from hypothesis import given, settings, strategies as st

from analytic_moments import (
    HopsInput,
    ThresholdForm,
    VarianceSource,
    critical_time,
    degree_hidden,
    hidden_moments,
    hidden_variances,
    inequality_margins,
    onset_time_numeric,
    oracle_moments,
    oracle_state,
    squeezing_function,
    squeezing_report,
)
from errors import InvalidAmplitudeError, NoCrossingError, RangeGuardError, ZeroDenominatorError

inputs = st.builds(
    HopsInput,
    ax_sq=st.floats(min_value=0.01, max_value=5.0),
    ph_mag=st.floats(min_value=0.0, max_value=4.0),
    delta_h=st.floats(min_value=-math.pi, max_value=math.pi),
)


def test_input_validation_and_wrapping():
    assert HopsInput(1.0, 1.0, 3.0 * math.pi / 2.0).delta_h == pytest.approx(-math.pi / 2.0)
    with pytest.raises(InvalidAmplitudeError):
        HopsInput(-1.0, 1.0, 0.0)
    with pytest.raises(InvalidAmplitudeError):
        HopsInput(1.0, float("nan"), 0.0)


def test_input_from_amplitudes():
    inp = HopsInput.from_amplitudes(1.0 + 1j, 2.0)
    assert inp.ax_sq == pytest.approx(2.0)
    assert inp.ph_mag == pytest.approx(math.sqrt(2.0))
    assert inp.delta_h == pytest.approx(math.pi / 4.0)
    alpha_x, alpha_y = inp.amplitudes(zeta=0.4)
    assert abs(alpha_x) ** 2 == pytest.approx(2.0)
    assert alpha_y / alpha_x.conjugate() == pytest.approx(1.0 + 1j)
    assert HopsInput.from_dict(inp.to_dict()) == inp


def test_moments_at_zero_time():
    moments = hidden_moments(HopsInput(1.0, 2.0, 0.5), 0.0)
    assert moments.h0 == pytest.approx(5.0)
    assert moments.h1 == pytest.approx(3.0)
    assert moments.h2 == pytest.approx(4.0 * math.cos(0.5))
    assert moments.h3 == pytest.approx(4.0 * math.sin(0.5))


def test_moments_spot_values():
    moments = hidden_moments(HopsInput(1.0, 1.0, 0.0), 0.25)
    assert moments.h0 == pytest.approx(3.62924, abs=1e-5)
    assert moments.h1 == pytest.approx(0.0)
    assert moments.h2 == pytest.approx(2.0)
    assert moments.h3 == pytest.approx(-3.52560, abs=1e-5)


def test_vacuum_moments():
    kt = 0.3
    moments = hidden_moments(HopsInput(0.0, 0.0, 0.0), kt)
    assert moments.h0 == pytest.approx(2.0 * math.sinh(2.0 * kt) ** 2)
    assert moments.h3 == pytest.approx(-math.sinh(4.0 * kt))
    assert (moments.h1, moments.h2) == (0.0, 0.0)


def test_variances_at_zero_time():
    inp = HopsInput(1.0, 2.0, 1.0)
    printed = hidden_variances(inp, 0.0)
    derived = hidden_variances(inp, 0.0, VarianceSource.DERIVED)
    assert printed.as_tuple() == pytest.approx((5.0, 5.0, 6.0, 4.0))
    assert derived.as_tuple() == pytest.approx((5.0, 5.0, 6.0, 6.0))


def test_variance_spot_value():
    v0 = hidden_variances(HopsInput(1.0, 1.0, 0.0), 0.25).v0
    assert v0 == pytest.approx(2.0 * math.cosh(2.0) + math.sinh(1.0) ** 2)
    assert v0 == pytest.approx(8.905489, abs=1e-6)


def test_printed_h3_variance_can_go_negative():
    variances = hidden_variances(HopsInput(0.25, 1.0, 0.0), 0.0, VarianceSource.CLOSED_FORM)
    assert variances.v3 == pytest.approx(-0.5)
    assert variances.anomalous
    assert not hidden_variances(HopsInput(0.25, 1.0, 0.0), 0.0, VarianceSource.DERIVED).anomalous


@pytest.mark.parametrize("point", [
    HopsInput(1.0, 1.0, 0.0),
    HopsInput(0.25, 1.0, math.pi / 2.0),
    HopsInput(0.5, 1.4, 3.0 * math.pi / 4.0),
    HopsInput(0.75, 0.8, -2.0),
])
@pytest.mark.parametrize("kt", [0.1, 0.25])
def test_closed_forms_match_oracle(point, kt):
    state = oracle_state(point, kt, n_max=24)
    measured = oracle_moments(point, kt, state=state)
    oracle = hidden_variances(point, kt, VarianceSource.ORACLE, state=state)
    closed = hidden_moments(point, kt)
    printed = hidden_variances(point, kt, VarianceSource.CLOSED_FORM)
    derived = hidden_variances(point, kt, VarianceSource.DERIVED)

    for expected, value in zip(closed.as_tuple(), measured.as_tuple()):
        assert value == pytest.approx(expected, rel=1e-6, abs=1e-6)
    for expected, value in zip((printed.v0, printed.v1, printed.v2, derived.v3), oracle.as_tuple()):
        assert value == pytest.approx(expected, rel=1e-6, abs=1e-6)
    assert printed.v3 - oracle.v3 == pytest.approx(-2.0, abs=1e-6)


def test_moments_do_not_depend_on_zeta():
    point = HopsInput(0.5, 1.0, -math.pi / 4.0)
    reference = oracle_moments(point, 0.25, n_max=24)
    shifted = oracle_moments(point, 0.25, n_max=24, zeta=1.1)
    assert shifted.as_tuple() == pytest.approx(reference.as_tuple(), abs=1e-9)


@pytest.mark.parametrize("delta, kt, expected", [
    (math.pi / 2.0, 0.25, 0.3737262),
    (math.pi / 2.0, 0.1, 0.6723636),
    (-math.pi / 2.0, 0.1, 1.4897812),
])
def test_squeezing_function_values(delta, kt, expected):
    assert squeezing_function(HopsInput(100.0, 1.0, delta), kt) == pytest.approx(expected, abs=1e-6)


def test_squeezing_function_limits():
    assert squeezing_function(HopsInput(1.0, 1.0, 1.0), 0.0) == pytest.approx(1.0)
    assert squeezing_function(HopsInput(0.0, 1.0, 1.0), 0.2) == pytest.approx(math.cosh(0.8))
    assert squeezing_function(HopsInput(2.0, 0.0, 1.0), 0.2) == pytest.approx(math.cosh(0.8))
    # Delta_h = 0 always squeezes H2
    assert squeezing_function(HopsInput(1.0, 1.0, 0.0), 0.3) > 1.0


def test_large_amplitude_growth():
    for kt in (0.1, 0.25, 0.5):
        sq = squeezing_function(HopsInput(100.0, 1.0, -math.pi / 2.0), kt)
        assert sq / math.exp(4.0 * kt) == pytest.approx(1.0, abs=0.02)


@settings(max_examples=60, deadline=None)
@given(inputs, st.floats(min_value=0.0, max_value=1.0))
def test_squeezing_function_tracks_h2_criterion(inp, kt):
    moments = hidden_moments(inp, kt)
    sq = squeezing_function(inp, kt)
    one_plus_h0 = abs(1.0 + moments.h0)
    assert one_plus_h0 == pytest.approx((1.0 + inp.total_photons) * sq, rel=1e-9, abs=1e-9)
    v2 = hidden_variances(inp, kt).v2
    if abs(sq - 1.0) > 1e-6:
        assert (sq > 1.0) == (v2 < one_plus_h0)


def test_inequality_margins_keys_and_sign():
    inp = HopsInput(1.0, 1.0, 0.0)
    margins = inequality_margins(hidden_moments(inp, 0.25), hidden_variances(inp, 0.25, VarianceSource.DERIVED))
    assert set(margins) == {'h0_vs_h3', 'h2_vs_h3', 'h2_vs_1_plus_h0', 'h3_vs_1_plus_h0', 'h3_vs_h2', 'h0_vs_h2'}
    assert margins['h2_vs_1_plus_h0'] == pytest.approx(3.0 - 4.62924, abs=1e-5)


def test_squeezing_report_with_oracle():
    report = squeezing_report(HopsInput(1.0, 1.0, 0.0), 0.25, n_max=24)
    assert report.decided and report.consistent and report.squeezed_h2
    assert report.inequality_margins['h2_vs_1_plus_h0'] < 0.0
    assert report.to_dict()['variance_source'] == 'oracle'


def test_squeezing_report_undecided_at_zero_time():
    report = squeezing_report(HopsInput(1e-6, 1.0, 1.0), 0.0, VarianceSource.DERIVED)
    assert not report.decided
    assert report.consistent


def test_squeezing_report_not_squeezed():
    report = squeezing_report(HopsInput(1.0, 1.0, math.pi / 2.0), 0.1, VarianceSource.DERIVED)
    assert report.decided and report.consistent
    assert not report.squeezed_h2


@settings(max_examples=60, deadline=None)
@given(inputs)
def test_degree_is_one_for_coherent_input(inp):
    assert degree_hidden(inp, 0.0) == pytest.approx(1.0, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(inputs, st.floats(min_value=0.01, max_value=1.0))
def test_degree_above_one_iff_h0_exceeds_photon_number(inp, kt):
    moments = hidden_moments(inp, kt)
    gap = moments.h0 - inp.total_photons
    if abs(gap) > 1e-9 * max(1.0, moments.h0):
        assert (degree_hidden(inp, kt) > 1.0) == (gap > 0.0)


@pytest.mark.parametrize("kt", [0.1, 0.25, 0.5])
def test_vacuum_degree(kt):
    assert degree_hidden(HopsInput(0.0, 0.0, 0.0), kt) == pytest.approx(1.0 / math.tanh(2.0 * kt))


def test_degree_undefined_for_vacuum_at_zero_time():
    with pytest.raises(ZeroDenominatorError):
        degree_hidden(HopsInput(0.0, 0.0, 0.0), 0.0)


def test_critical_time_forms():
    inp = HopsInput(4.0, 1.0, math.pi / 2.0)
    assert critical_time(inp) == pytest.approx(0.708303, abs=1e-6)
    assert critical_time(inp, form=ThresholdForm.PRINTED) == pytest.approx(0.112996, abs=1e-6)
    assert critical_time(inp, k=2.0) == pytest.approx(0.708303 / 2.0, abs=1e-6)


@pytest.mark.parametrize("point", [
    HopsInput(4.0, 1.0, math.pi / 2.0),
    HopsInput(0.5, 5.0, math.pi / 2.0),
    HopsInput(1.0, 0.5, 1.0),
    HopsInput(0.25, 1.0, 2.5),
])
def test_critical_time_matches_bisection(point):
    t0 = critical_time(point)
    assert onset_time_numeric(point) == pytest.approx(t0, rel=1e-6)
    assert degree_hidden(point, t0 - 1e-4) < 1.0 < degree_hidden(point, t0 + 1e-4)


@pytest.mark.parametrize("delta", [0.0, -math.pi / 2.0, -0.3])
def test_no_onset_without_positive_sine(delta):
    point = HopsInput(1.0, 1.0, delta)
    assert critical_time(point) is None
    assert onset_time_numeric(point) == 0.0


def test_onset_beyond_scan_range():
    with pytest.raises(NoCrossingError):
        onset_time_numeric(HopsInput(1000.0, 1.0, math.pi / 2.0))


def test_critical_time_guards():
    with pytest.raises(ZeroDenominatorError):
        critical_time(HopsInput(0.0, 1.0, 1.0))
    with pytest.raises(ZeroDenominatorError):
        critical_time(HopsInput(1.0, 0.0, 1.0))
    with pytest.raises(RangeGuardError):
        critical_time(HopsInput(1.0, 1.0, 1.0), k=0.0)
