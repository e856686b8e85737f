import pytest

ACCEPTANCE_LINES = pytest.StashKey[dict]()


@pytest.fixture
def report(request):
    """Record the one-line PASS/FAIL verdict of an acceptance criterion."""
    lines = request.config.stash.setdefault(ACCEPTANCE_LINES, {})

    def emit(number: int, ok: bool, detail: str):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines[number] = line
        print(line)
        return ok

    return emit


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LINES, {})
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(lines):
        terminalreporter.write_line(lines[number])
