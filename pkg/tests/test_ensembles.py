"""
Tests for classical and phase-averaged quantum ensembles
"""
import csv
import math

import numpy as np
import pytest

from ensembles import (
    HopsEnsembleSpec,
    ParameterEstimator,
    PolarizedFieldSpec,
    classical_parameters,
    demo_rows,
    ihop_of_spec,
    iop_ihop_in_basis,
    mirrored_polarized_spec,
    quantum_parameters,
    write_parameters_csv,
)
from errors import InvalidAmplitudeError, InvalidConfigError, ZeroDenominatorError
from fock_core import make_fock_space
from polarization_ops import BasisVector


def test_hops_ensemble_has_hidden_but_no_stokes_polarization():
    params = classical_parameters(HopsEnsembleSpec(a0=2.0, chi_h=math.pi / 2.0, delta_h=0.0))
    assert params.stokes == pytest.approx((4.0, 0.0, 0.0, 0.0), abs=1e-12)
    assert params.hidden == pytest.approx((4.0, 0.0, 4.0, 0.0), abs=1e-12)


def test_hops_ensemble_phase_moves_into_h3():
    params = classical_parameters(HopsEnsembleSpec(a0=2.0, chi_h=math.pi / 2.0, delta_h=math.pi / 2.0))
    assert params.h2 == pytest.approx(0.0, abs=1e-12)
    assert params.h3 == pytest.approx(4.0)
    assert params.stokes_residual < 1e-12


def test_polarized_ensemble_has_no_hidden_polarization():
    params = classical_parameters(PolarizedFieldSpec(a0=2.0, chi0=math.pi / 2.0, delta0=0.0))
    assert params.s2 == pytest.approx(4.0)
    assert params.hidden_pair_magnitude < 1e-12


def test_unequal_split():
    # chi_h = pi / 3 puts cos^2(pi/6) = 3/4 of the intensity in x
    params = classical_parameters(HopsEnsembleSpec(a0=2.0, chi_h=math.pi / 3.0, delta_h=0.0))
    assert params.s1 == pytest.approx(-2.0)
    assert params.hidden_pair_magnitude == pytest.approx(2.0 * 4.0 * math.cos(math.pi / 6.0) * math.sin(math.pi / 6.0))


@pytest.mark.parametrize("n_phases", [0, 2, 3, 4.5])
def test_phase_grid_needs_four_samples(n_phases):
    with pytest.raises(InvalidConfigError):
        classical_parameters(HopsEnsembleSpec(a0=1.0, chi_h=1.0, delta_h=0.0, n_phases=n_phases))


def test_spec_validation():
    with pytest.raises(InvalidAmplitudeError):
        HopsEnsembleSpec(a0=-1.0, chi_h=1.0, delta_h=0.0)
    with pytest.raises(InvalidAmplitudeError):
        PolarizedFieldSpec(a0=1.0, chi0=4.0, delta0=0.0)


def test_monte_carlo_converges_and_is_seeded():
    spec = HopsEnsembleSpec(a0=2.0, chi_h=math.pi / 2.0, delta_h=0.0)
    first = classical_parameters(spec, ParameterEstimator.MONTE_CARLO, n_samples=20000, seed=7)
    second = classical_parameters(spec, "monte_carlo", n_samples=20000, seed=7)
    assert first.to_dict() == second.to_dict()
    assert first.h2 == pytest.approx(4.0)
    # s2, s3 average cos/sin(2 zeta); their spread is 4 / sqrt(2 n)
    assert abs(first.s2) < 0.15
    assert abs(first.s3) < 0.15


def test_monte_carlo_with_amplitude_fluctuations():
    spec = HopsEnsembleSpec(a0=2.0, chi_h=math.pi / 2.0, delta_h=0.0)

    def rayleigh(rng, count):
        return rng.rayleigh(scale=math.sqrt(2.0), size=count)

    params = classical_parameters(spec, ParameterEstimator.MONTE_CARLO, n_samples=40000, amplitude_sampler=rayleigh)
    # <A0^2> = 2 sigma^2 = 4
    assert params.s0 == pytest.approx(4.0, rel=0.05)
    assert params.h2 == pytest.approx(params.s0, rel=1e-12)

    with pytest.raises(InvalidAmplitudeError):
        classical_parameters(spec, ParameterEstimator.MONTE_CARLO, n_samples=10,
                             amplitude_sampler=lambda rng, count: -np.ones(count))


@pytest.mark.parametrize("delta", [0.0, math.pi / 2.0])
def test_quantum_path_matches_classical(delta):
    space = make_fock_space(20)
    spec = HopsEnsembleSpec(a0=2.0, chi_h=math.pi / 2.0, delta_h=delta, n_phases=16)
    quantum = quantum_parameters(space, spec)
    classical = classical_parameters(spec)
    assert quantum.path == "quantum"
    assert quantum.stokes_residual < 1e-10
    assert quantum.hidden_pair_magnitude == pytest.approx(4.0, abs=1e-10)
    assert np.allclose(quantum.stokes + quantum.hidden, classical.stokes + classical.hidden, atol=1e-10)

    polarized = quantum_parameters(space, mirrored_polarized_spec(spec))
    assert polarized.hidden_pair_magnitude < 1e-10
    assert math.hypot(polarized.s2, polarized.s3) == pytest.approx(4.0, abs=1e-10)


def test_iop_in_basis():
    x_polarized = PolarizedFieldSpec(a0=1.0, chi0=0.0, delta0=0.0)
    assert iop_ihop_in_basis(x_polarized, BasisVector.linear_x()) == pytest.approx(0.0)
    diagonal = PolarizedFieldSpec(a0=1.0, chi0=math.pi / 2.0, delta0=0.0)
    assert iop_ihop_in_basis(diagonal, BasisVector.linear_x()) == pytest.approx(1.0)
    assert iop_ihop_in_basis(diagonal, BasisVector.diagonal()) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ZeroDenominatorError):
        iop_ihop_in_basis(x_polarized, BasisVector.linear_y())


def test_ihop_of_spec():
    spec = HopsEnsembleSpec(a0=1.0, chi_h=math.pi / 2.0, delta_h=math.pi / 3.0)
    assert ihop_of_spec(spec) == pytest.approx(complex(math.cos(math.pi / 3.0), math.sin(math.pi / 3.0)))
    with pytest.raises(ZeroDenominatorError):
        ihop_of_spec(HopsEnsembleSpec(a0=1.0, chi_h=math.pi, delta_h=0.0))


def test_hidden_polarization_is_basis_dependent():
    # HOPS built in the diagonal basis: Stokes stay unpolarized, x/y pair correlation averages out
    spec = HopsEnsembleSpec(a0=2.0, chi_h=math.pi / 2.0, delta_h=0.4, basis=BasisVector.diagonal())
    params = classical_parameters(spec)
    assert params.stokes_residual < 1e-12
    assert params.hidden_pair_magnitude < 1e-12


def test_demo_rows_and_csv(tmp_path):
    rows = demo_rows(HopsEnsembleSpec(a0=0.0, chi_h=math.pi / 2.0, delta_h=0.0, n_phases=8), n_max=4)
    assert [(row['ensemble'], row['path']) for row in rows] == [
        ('hops', 'classical'), ('hops', 'quantum'), ('polarized', 'classical'), ('polarized', 'quantum'),
    ]
    for row in rows:
        assert all(abs(row[key]) < 1e-12 for key in ('s0', 's1', 's2', 's3', 'h0', 'h1', 'h2', 'h3'))

    path = write_parameters_csv(rows, tmp_path / "demo" / "params.csv")
    with open(path, newline="", encoding="utf-8") as f:
        records = list(csv.DictReader(f))
    assert len(records) == 4
    assert records[0]['ensemble'] == 'hops'
