import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fraclab import EnergyContext, GridSpec, Nonlinearity, Potential, assemble_operator  # noqa: E402


def make_ctx(s, n=128, a=-1.0, b=1.0, model=None, V=1.0):
    grid = GridSpec.interval(a, b, n)
    return EnergyContext(assemble_operator(grid, s), Potential.constant(V), model or Nonlinearity.power(4.0))


@pytest.fixture
def ctx_factory():
    return make_ctx


@pytest.fixture(scope="session")
def cubic_reference():
    from oracles import cubic_ground_state_1d

    return cubic_ground_state_1d()


ACCEPTANCE_LINES: list[str] = []


def record_criterion(label: str, passed: bool, detail: str) -> None:
    line = f"{label}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
