"""Shared pytest hooks: surface the acceptance pass/fail lines.

The acceptance tests record one line per criterion; printing them here,
in the terminal summary, keeps them visible even though pytest captures
stdout during the tests themselves.
"""

acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
