from __future__ import annotations

import pytest

from flowarch import company_architecture, company_script
from flowarch.calculus import CheckConfig, Mode

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def company_doc():
    return company_architecture()


@pytest.fixture()
def company(company_doc):
    return company_doc.system


@pytest.fixture(scope="session")
def company_steps():
    return company_script()


@pytest.fixture()
def config():
    return CheckConfig(horizon=3, bound=1, mode=Mode.STRUCTURAL_FIRST)


@pytest.fixture()
def fast_config():
    return CheckConfig(horizon=2, bound=1, mode=Mode.STRUCTURAL_FIRST)
