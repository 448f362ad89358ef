import pytest

from soficov import fixtures as fx

import oracles


@pytest.fixture(scope="session")
def corpus():
    return fx.all_fixtures()


@pytest.fixture(scope="session")
def random_corpus():
    return oracles.random_graphs()


def pytest_terminal_summary(terminalreporter):
    results = oracles.ACCEPTANCE
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, note = results[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {note}")
