import numpy as np
import pytest

from horolab.sieve import build_sieve_table

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def small_table():
    return build_sieve_table(200_000)


@pytest.fixture(scope="session")
def table_1e7():
    return build_sieve_table(10**7)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
