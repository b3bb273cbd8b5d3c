import pytest

# one line per acceptance criterion, echoed in the terminal summary so the
# pass/fail verdicts are visible even when pytest captures stdout
ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    def record(num, ok, detail):
        line = f"ACCEPTANCE {num}: {'PASS' if ok else 'FAIL'} - {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
