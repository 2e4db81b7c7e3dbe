import sys


def pytest_terminal_summary(terminalreporter):
    lines = []
    for mod in list(sys.modules.values()):
        lines.extend(getattr(mod, "ACCEPTANCE_RESULTS", {}).items())
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
