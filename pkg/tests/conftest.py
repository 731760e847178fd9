from __future__ import annotations

import pytest

from corpus import NOTES, canonical

_ACCEPTANCE: dict[str, str] = {}


@pytest.fixture(scope="session")
def graphs():
    return canonical()


@pytest.fixture
def p3(graphs):
    return graphs["P3"]


@pytest.fixture
def s3(graphs):
    return graphs["S3"]


@pytest.fixture
def c4(graphs):
    return graphs["C4"]


@pytest.fixture
def k2(graphs):
    return graphs["K2"]


@pytest.fixture
def k3(graphs):
    return graphs["K3"]


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    _ACCEPTANCE[name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in sorted(_ACCEPTANCE.items()):
        terminalreporter.write_line(f"{status}  {name}")
    for line in NOTES:
        terminalreporter.write_line(f"note  {line}")
