"""
Tests for the hops_sim command line
"""
import csv
import json
import math

import pytest

from config import EXIT_CODES, REPORT_SUMMARY_FILE
from errors import InvalidConfigError
from hops_sim import build_parser, build_sweep_config, main


def parse(*argv):
    return build_parser().parse_args(list(argv))


def test_sweep_point_preset(tmp_path, capsys):
    out = tmp_path / "point.csv"
    assert main(['sweep', '--preset', 'point', '--out', str(out)]) == EXIT_CODES['SUCCESS']
    with open(out, newline="", encoding="utf-8") as f:
        records = list(csv.DictReader(f))
    assert len(records) == 4
    assert "4 filas escritas" in capsys.readouterr().out


@pytest.mark.parametrize("preset, ph_mag", [("fig1a", 1.0), ("fig1b", 5.0)])
def test_sweep_figure_presets(tmp_path, capsys, preset, ph_mag):
    out = tmp_path / f"{preset}.csv"
    assert main(['sweep', '--preset', preset, '--out', str(out)]) == EXIT_CODES['SUCCESS']
    with open(out, newline="", encoding="utf-8") as f:
        records = list(csv.DictReader(f))
    assert len(records) == 50 * 72
    meta = json.loads(out.with_name(out.name + '.meta.json').read_text(encoding="utf-8"))
    assert meta['config']['preset'] == preset
    assert meta['config']['ph_mag'] == ph_mag
    assert "3600 filas escritas" in capsys.readouterr().out


def test_preset_alias_is_stored_by_canonical_name():
    assert build_sweep_config(parse('sweep', '--preset', 'equal')).preset == 'fig1a'
    assert build_sweep_config(parse('sweep', '--preset', 'unequal')).ph_mag == 5.0


@pytest.mark.parametrize("argv", [
    ['sweep', '--steps', '1'],
    ['sweep', '--kt-max', '9'],
    ['sweep', '--outputs', 'sq,entropy'],
    ['sweep', '--oracle', '--n-max', '64'],
])
def test_sweep_usage_errors(tmp_path, argv):
    assert main(argv + ['--out', str(tmp_path / "x.csv")]) == EXIT_CODES['USAGE_ERROR']
    assert not (tmp_path / "x.csv").exists()


def test_sweep_config_file_errors(tmp_path):
    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({'ax_sq': 1.0, 'colour': 'blue'}), encoding="utf-8")
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    for path in (unknown, broken, tmp_path / "absent.json"):
        assert main(['sweep', '--config', str(path), '--out', str(tmp_path / "x.csv")]) == EXIT_CODES['USAGE_ERROR']


def test_config_precedence(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({'ax_sq': 3.0, 'kt_range': [0.0, 0.5, 11], 'outputs': ['sq', 'degree']}),
                    encoding="utf-8")
    config = build_sweep_config(parse('sweep', '--preset', 'fig1b', '--config', str(path), '--ph-mag', '2.5',
                                      '--steps', '6'))
    # flags beat the file, the file beats the preset
    assert config.ph_mag == 2.5
    assert config.ax_sq == 3.0
    assert config.kt_range == (0.0, 0.5, 6)
    assert config.delta_range == pytest.approx((-math.pi, math.pi, 72))
    assert list(config.outputs) == ['sq', 'degree']
    assert config.preset == 'fig1b'


def test_invalid_preset_range_is_rejected():
    with pytest.raises(InvalidConfigError):
        build_sweep_config(parse('sweep', '--preset', 'point', '--kt-min', '0.5', '--kt-max', '0.25'))


def test_verify_with_missing_fixture(tmp_path):
    argv = ['verify', '--grid-fixture', str(tmp_path / "absent.json"), '--out', str(tmp_path / "reports")]
    assert main(argv) == EXIT_CODES['USAGE_ERROR']
    assert not (tmp_path / "reports").exists()


def test_verify_with_corrupted_fixture(tmp_path):
    path = tmp_path / "grid.json"
    path.write_text('{"version": 1, "kt_values": [0.0], "points": [', encoding="utf-8")
    assert main(['verify', '--grid-fixture', str(path), '--out', str(tmp_path / "reports")]) == EXIT_CODES['USAGE_ERROR']


@pytest.mark.slow
def test_verify_reports_truncation_failures(tmp_path, tiny_fixture):
    fixture = tiny_fixture([(4.0, 1.0, 0.0)], kt_values=(0.0,))
    out = tmp_path / "reports"
    assert main(['verify', '--grid-fixture', str(fixture), '--n-max', '2', '--out', str(out)]) == \
        EXIT_CODES['VERIFICATION_FAILURE']
    summary = json.loads((out / REPORT_SUMMARY_FILE).read_text(encoding="utf-8"))
    assert summary['passed'] is False
    assert any(row['quantity'] == 'error' for row in summary['failures'])


def test_demo_hidden(tmp_path, capsys):
    out = tmp_path / "demo.csv"
    assert main(['demo-hidden', '--n-max', '20', '--n-phases', '8', '--out', str(out)]) == EXIT_CODES['SUCCESS']
    printed = capsys.readouterr().out
    assert "Stokes vs ocultos" in printed
    with open(out, newline="", encoding="utf-8") as f:
        records = list(csv.DictReader(f))
    assert [(r['ensemble'], r['path']) for r in records] == [
        ('hops', 'classical'), ('hops', 'quantum'), ('polarized', 'classical'), ('polarized', 'quantum'),
    ]
    assert float(records[0]['h2']) == pytest.approx(4.0)
    assert abs(float(records[0]['s2'])) < 1e-10


def test_demo_hidden_rejects_small_phase_grid():
    assert main(['demo-hidden', '--n-phases', '3', '--n-max', '4']) == EXIT_CODES['USAGE_ERROR']


def test_unknown_subcommand_exits_with_usage_error():
    with pytest.raises(SystemExit) as info:
        main(['fly'])
    assert info.value.code == 2
