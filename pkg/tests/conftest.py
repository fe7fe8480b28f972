import re

import pytest

from combilog import parse_program

HEAD_SRC = "head <- make[3,1](cons).\n"

SIBLINGS_SRC = """\
siblings <- make[1,2](and(and(make[2,3,1](parent), make[3,2,1](parent)), make[1,2,3](ineq))).
parent(p, a).
parent(p, b).
parent(q, c).
"""

APPEND_SRC = "app <- foldr(cons, eq).\n"


@pytest.fixture
def head_program():
    return parse_program(HEAD_SRC)


@pytest.fixture
def siblings_program():
    return parse_program(SIBLINGS_SRC)


@pytest.fixture
def append_program():
    return parse_program(APPEND_SRC)


_acceptance = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    m = re.search(r"test_ac(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    key = (int(m.group(1)), m.group(2).replace("_", " "))
    if report.when == "call" or report.outcome != "passed":
        if report.failed or key not in _acceptance:
            _acceptance[key] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for (n, title), outcome in sorted(_acceptance.items()):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {n}: {title}")
