"""
Tests for the grid fixture, the verification suites and the report
"""
import json
import math

import pytest

from errors import FixtureError
from verification_report import VerificationReport
from verification_suites import (
    load_grid_fixture,
    run_algebra_suite,
    run_degree_suite,
    run_factorization_suite,
    run_ihop_suite,
    run_moment_suites,
    run_uncertainty_suite,
    run_verification,
)


def suite_rows(report, suite):
    return [row for row in report.rows if row.suite == suite]


def test_pinned_fixture(grid):
    assert grid.version == 1
    assert grid.kt_values == [0.0, 0.1, 0.25]
    assert len(grid.points) == 12
    assert len(list(grid.cases())) == 36
    assert grid.points[1].delta_h == pytest.approx(math.pi / 2.0)


def test_missing_fixture(tmp_path):
    with pytest.raises(FixtureError) as info:
        load_grid_fixture(str(tmp_path / "absent.json"))
    assert info.value.path.endswith("absent.json")


@pytest.mark.parametrize("content", [
    "{not json",
    json.dumps([1, 2, 3]),
    json.dumps({"version": 2, "kt_values": [0.0], "points": []}),
    json.dumps({"version": 1, "kt_values": [0.0]}),
    json.dumps({"version": 1, "kt_values": [0.0], "points": [{"ax_sq": 1.0}]}),
    json.dumps({"version": 1, "kt_values": [0.0], "points": [{"ax_sq": -1.0, "ph_mag": 1.0, "delta_h": 0.0}]}),
    json.dumps({"version": 1, "kt_values": [], "points": [{"ax_sq": 1.0, "ph_mag": 1.0, "delta_h": 0.0}]}),
])
def test_corrupted_fixture(tmp_path, content):
    path = tmp_path / "fixture.json"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(FixtureError):
        load_grid_fixture(str(path))


def test_report_bookkeeping(tmp_path):
    report = VerificationReport(n_max=8, fixture_path="grid.json")
    assert report.add('moments', 'case', 'h0', 2.0, 2.0 + 1e-7, 1e-6, relative=True).passed
    assert not report.add('moments', 'case', 'h1', 0.0, 1e-3, 1e-6).passed
    report.add('variance_h3_printed', 'case', 'v3 printed', 1.0, 3.0, 1e-6, informational=True)
    report.add_failure('ihop', 'case', 'pole')

    assert not report.passed
    assert [(row.suite, row.quantity) for row in report.get_failures()] == [('moments', 'h1'), ('ihop', 'error')]
    assert len(report.get_informational('variance_h3_printed')) == 1
    summaries = {summary.suite: summary for summary in report.get_suite_summaries()}
    assert summaries['moments'].failures == 1
    assert summaries['variance_h3_printed'].passed
    assert summaries['moments'].max_deviation == pytest.approx(1e-3)

    paths = report.save_data(str(tmp_path / "reports"))
    text = open(paths['text'], encoding="utf-8").read()
    assert "FAILED" in text and "Informational comparisons" in text
    summary = json.loads(open(paths['summary'], encoding="utf-8").read())
    assert summary['passed'] is False
    assert 'generated' in summary

    reloaded = VerificationReport.load_rows(paths['csv'])
    assert len(reloaded.rows) == 4
    assert reloaded.rows[0].expected == pytest.approx(2.0)
    assert reloaded.rows[2].informational
    assert reloaded.rows[3].expected is None


def test_algebra_suite_records_printed_sign_as_informational():
    report = VerificationReport(n_max=8)
    run_algebra_suite(report)
    assert report.passed
    informational = report.get_informational('algebra')
    assert [row.case for row in informational] == ['[H0,H2]']


def test_suites_on_small_fixture(tiny_fixture):
    fixture = load_grid_fixture(str(tiny_fixture([(0.25, 1.0, math.pi / 2.0), (0.5, 0.5, -0.7)])))
    report = VerificationReport(n_max=16, fixture_path=fixture.path)
    run_uncertainty_suite(report, fixture, 16)
    run_moment_suites(report, fixture, 16)
    run_degree_suite(report, fixture)
    run_ihop_suite(report, fixture, 16)
    run_factorization_suite(report, fixture, 16)

    assert report.passed, report.render_text()
    suites = {summary.suite for summary in report.get_suite_summaries()}
    assert {'uncertainty', 'moments', 'variances', 'h2_constancy', 'squeezing', 'zeta_independence',
            'squeezing_limits', 'degree', 'critical_time', 'ihop', 'pictures', 'factorization'} <= suites

    printed_v3 = report.get_informational('variance_h3_printed')
    assert all(row.expected - row.measured == pytest.approx(-2.0, abs=1e-6) for row in printed_v3)
    assert report.get_informational('critical_time_printed')
    assert suite_rows(report, 'factorization_printed')


def test_pictures_cover_every_heisenberg_time(tiny_fixture):
    fixture = load_grid_fixture(str(tiny_fixture([(1.0, 1.0, -math.pi / 2.0), (0.5, 0.5, -0.7)])))
    report = VerificationReport(n_max=16, fixture_path=fixture.path)
    run_ihop_suite(report, fixture, 16)

    assert report.passed, report.render_text()
    pictures = suite_rows(report, 'pictures')
    assert len(pictures) == 6
    assert {row.case.rsplit('@', 1)[1] for row in pictures} == {'kt=0.1', 'kt=0.25', 'kt=0.5'}
    assert all(row.passed for row in pictures if row.case.endswith('@kt=0.5'))


def test_truncation_failures_become_rows(tiny_fixture):
    fixture = load_grid_fixture(str(tiny_fixture([(4.0, 1.0, 0.0)], kt_values=(0.0,))))
    report = VerificationReport(n_max=2)
    run_moment_suites(report, fixture, 2)
    failures = report.get_failures()
    assert failures and failures[0].quantity == 'error'
    assert "too small" in failures[0].note


@pytest.mark.slow
def test_pinned_grid_verifies(grid, tmp_path):
    report = run_verification(24, grid)
    assert report.passed, report.render_text()
    assert report.get_informational('algebra')
    paths = report.save_data(str(tmp_path))
    assert json.loads(open(paths['summary'], encoding="utf-8").read())['passed'] is True
