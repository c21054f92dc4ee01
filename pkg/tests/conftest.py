import pytest

_LINES = {}


@pytest.fixture
def criterion(request):
    """Record a one-line verdict for an acceptance criterion; printed in the terminal summary."""

    def record(number, ok, detail):
        _LINES[number] = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_LINES):
        terminalreporter.write_line(_LINES[n])
