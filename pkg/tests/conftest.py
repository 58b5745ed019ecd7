"""Shared pytest plumbing: collect acceptance PASS/FAIL lines and print
them as a summary section, outside of per-test output capture."""

_acceptance_lines: list[str] = []


def register_acceptance_line(line: str) -> None:
    _acceptance_lines.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
