from __future__ import annotations

import pytest

from cutbound.ensemble import make_graph

_acceptance_lines: list[str] = []


@pytest.fixture
def record_criterion():
    """Log one PASS/FAIL line per acceptance criterion, then assert it."""

    def record(label: str, passed: bool, detail: str = "") -> None:
        _acceptance_lines.append(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}".rstrip())
        assert passed, f"{label}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture
def triangle():
    return make_graph(3, [(1, 2), (2, 3), (1, 3)])


@pytest.fixture
def path3():
    return make_graph(3, [(1, 2), (2, 3)])


@pytest.fixture
def two_edges():
    return make_graph(4, [(1, 2), (3, 4)])


@pytest.fixture
def star4():
    return make_graph(4, [(1, 2), (1, 3), (1, 4)])

