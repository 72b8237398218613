import sys
from pathlib import Path

import pytest

from arrvar.coxdata import ExponentData, build_ring
from arrvar.varietycore import VarietyData

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))
FIXTURES = HERE.parent / "fixtures"

RUN_A = [[1, 0, 0, 1, 1], [0, 1, 0, 1, 0], [0, 0, 1, 0, 1]]
RUN_L = ((1, 1), (2,), (2,), (2,), (2,))
RUN_D = [[-2, -3, 1, 1, 1, 1, 1]]
RUN_CONES = [[1, 2, 3, 4, 5], [0, 3, 5, 6], [0, 2, 4, 6], [0, 1, 3, 5], [0, 1, 2, 4],
             [4, 5, 6], [3, 4, 6], [2, 5, 6], [2, 3, 6]]


def make_run_ring():
    return build_ring(RUN_A, ExponentData(RUN_L, 1), RUN_D)


@pytest.fixture(scope="session")
def run_ring():
    return make_run_ring()


@pytest.fixture(scope="session")
def run_variety(run_ring):
    return VarietyData(run_ring, RUN_CONES)


@pytest.fixture(scope="session")
def fixture_dir():
    return FIXTURES


ACCEPTANCE_LINES = []


def record_acceptance(number, ok, detail, seconds):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({seconds:.1f}s) {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
