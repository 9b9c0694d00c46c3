"""Shared test fixtures: the acceptance suite records one summary line per
criterion; the hook below reprints them after the pytest summary so the
pass/fail lines are visible even when output capture is on."""

import pytest

_acceptance_lines = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _acceptance_lines


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
