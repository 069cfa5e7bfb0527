"""
Shared fixtures for the HOPS simulator tests
"""
import json
from pathlib import Path

import pytest

from fock_core import make_fock_space
from verification_suites import load_grid_fixture

ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture(scope="session")
def space8():
    return make_fock_space(8)


@pytest.fixture(scope="session")
def space24():
    return make_fock_space(24)


@pytest.fixture(scope="session")
def grid():
    return load_grid_fixture(str(ROOT / "grid_fixture.json"))


@pytest.fixture
def tiny_fixture(tmp_path):
    """Write a one-point grid fixture and return its path"""
    def write(points, kt_values=(0.0, 0.1), version=1):
        path = tmp_path / "fixture.json"
        path.write_text(json.dumps({
            "version": version,
            "kt_values": list(kt_values),
            "points": [{"ax_sq": a, "ph_mag": p, "delta_h": d} for a, p, d in points],
        }), encoding="utf-8")
        return path
    return write
