from __future__ import annotations

import pytest

from twincut.construction import twincut_graph
from twincut.graph import complete_graph, cube_graph, cycle_graph


@pytest.fixture(scope="session")
def g4():
    return twincut_graph(4)


@pytest.fixture(scope="session")
def g5():
    return twincut_graph(5)


@pytest.fixture
def c5():
    return cycle_graph(5)


@pytest.fixture
def k2():
    return complete_graph(2)


@pytest.fixture
def q3():
    return cube_graph()


# One PASS/FAIL line per acceptance criterion in the terminal summary;
# parametrized cases of a criterion are folded into one line.
_criteria: dict[str, str] = {}
_RANK = {"PASSED": 0, "SKIPPED": 1, "FAILED": 2}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1].split("[")[0]
    if report.when == "call" or report.outcome != "passed":
        outcome = report.outcome.upper()
        if _RANK.get(outcome, 2) >= _RANK.get(_criteria.get(name, "PASSED"), 2):
            _criteria[name] = outcome


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_criteria.items()):
        terminalreporter.write_line(f"{outcome:<7} {name}")
