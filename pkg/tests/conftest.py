"""Prints the acceptance summary: one PASS/FAIL line per criterion."""

import re

_outcomes: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    number = int(m[1])
    if report.when == "call" or report.failed:
        if report.failed or number not in _outcomes:
            _outcomes[number] = ("PASS" if report.passed else "FAIL", m[2].replace("_", " "))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        status, name = _outcomes[number]
        terminalreporter.write_line(f"criterion {number}: {status}  {name}")
