from __future__ import annotations

import pytest

from hyperdet import acceptance, detfun, epsilon

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def system():
    return epsilon.build_system()


@pytest.fixture(scope="session")
def solved(system):
    return epsilon.solve_epsilon(system)


@pytest.fixture(scope="session")
def table(solved):
    return solved[0]


@pytest.fixture(scope="session")
def terms():
    return detfun.load_brackets()


@pytest.fixture(scope="session")
def acceptance_ctx(system, solved, terms):
    ctx = acceptance.Context(seed=42)
    # reuse the session-wide solve instead of repeating it
    ctx.system = system
    ctx.solved = solved
    ctx.terms = terms
    return ctx


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path_factory, monkeypatch):
    monkeypatch.setenv("HYPERDET_CACHE", str(tmp_path_factory.getbasetemp() / "cache"))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
