from __future__ import annotations

import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from canvasskit import fixtures  # noqa: E402


@pytest.fixture(scope="session")
def desk():
    """Desk-scale Fulton records: every planted anomaly, a few thousand CVRs."""
    return fixtures.build_dataset(fixtures.preset("paper-fulton-desk"))


@pytest.fixture(scope="session")
def desk_dir(tmp_path_factory, desk):
    out = tmp_path_factory.mktemp("desk")
    fixtures.write_dataset(desk, out, fixtures.preset("paper-fulton-desk"))
    return out


@pytest.fixture(scope="session")
def clean_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("clean")
    fixtures.generate(fixtures.preset("clean"), out)
    return out


@pytest.fixture(scope="session")
def fulton_full():
    """Full-scale Fulton records (about 530k CVRs per machine count)."""
    t0 = time.perf_counter()
    ds = fixtures.build_dataset(fixtures.preset("paper-fulton"))
    _timings["fulton_build"] = time.perf_counter() - t0
    return ds


@pytest.fixture(scope="session")
def fulton_build_seconds(fulton_full):
    return _timings["fulton_build"]


_timings: dict[str, float] = {}


_acceptance: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        if "test_acceptance.py" in report.nodeid:
            _acceptance[report.nodeid.split("::")[-1]] = report.outcome.upper()


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_acceptance.items()):
        terminalreporter.write_line(f"{'PASS' if outcome == 'PASSED' else 'FAIL'}  {name}")
