"""Shared fixtures: the acceptance-criteria summary printed after the run."""

import pytest

_acceptance_lines: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    """Mutable list of acceptance result lines, echoed in the terminal summary."""
    return _acceptance_lines


def record_criterion(log: list, number: int, passed: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'} - {detail}"
    log.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
