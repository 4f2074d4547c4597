import pytest

from hybrid_d2d.params import SystemParams

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE_RESULTS: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def table1():
    return SystemParams()


@pytest.fixture
def small_window():
    """A cheap deployment (about 60 expected points) for analytic property checks."""
    return SystemParams(R=30.0, zeta_A=0.02)
