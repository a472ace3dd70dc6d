"""Shared fixtures: acceptance-criterion logging with a terminal summary."""

import pytest


def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture(scope="session")
def criterion_log(pytestconfig):
    """Record one pass/fail line per acceptance criterion."""

    def record(num: int, description: str, passed: bool) -> None:
        line = f"ACCEPTANCE {num:02d} {'PASS' if passed else 'FAIL'} - {description}"
        pytestconfig._acceptance_lines.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
