import pytest

ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])


@pytest.fixture
def criterion(request):
    """Record a pass/fail line for one acceptance criterion: ``with criterion(3, "what"):``."""
    from contextlib import contextmanager

    @contextmanager
    def check(n: int, text: str):
        ACCEPTANCE_LINES[n] = f"[FAIL] criterion {n}: {text}"
        yield
        ACCEPTANCE_LINES[n] = f"[PASS] criterion {n}: {text}"

    return check
