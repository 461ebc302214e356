import pytest

from slitwall.grid import GridSpec
from slitwall.states import StateKind, StateSpec

# criterion number -> (verdict, title), filled from tests marked ``acceptance``
ACCEPTANCE_RESULTS: dict[int, tuple[str, str]] = {}


@pytest.fixture
def grid():
    """Fine grid with k = 1 on the momentum lattice."""
    return GridSpec.from_momentum_spacing(1 / 32, 8192)


def gaussian(sigma, **extra):
    return StateSpec(StateKind.GAUSSIAN_POSITION, {"sigma": sigma, **extra})


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when != "call" and not report.failed:
        return
    number, title = marker.args
    verdict = "PASS" if report.passed else "FAIL"
    if report.when == "call" or verdict == "FAIL":
        ACCEPTANCE_RESULTS[number] = (verdict, title)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        verdict, title = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"{verdict}  criterion {number}: {title}")
