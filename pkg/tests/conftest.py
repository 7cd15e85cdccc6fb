import re

import pytest

from bakermodel.fields import build_field
from bakermodel.laurent import parse_polynomial

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")
_outcomes = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    k = int(m.group(1))
    if report.when == "call" or report.outcome != "passed":
        if _outcomes.get(k) != "FAIL":
            _outcomes[k] = "PASS" if report.outcome == "passed" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_outcomes):
        terminalreporter.write_line(f"criterion {k}: {_outcomes[k]}")


@pytest.fixture(scope="session")
def F2():
    return build_field(2, 1)


@pytest.fixture(scope="session")
def F3():
    return build_field(3, 1)


@pytest.fixture(scope="session")
def F5():
    return build_field(5, 1)


@pytest.fixture(scope="session")
def F7():
    return build_field(7, 1)


def poly(text, tower, names=("x", "y")):
    return parse_polynomial(text, tower, names)
