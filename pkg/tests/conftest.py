import pytest

_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def verdict(request):
    """Record a criterion's outcome; the line is printed in the terminal summary."""
    def record(number: int, ok: bool, detail: str) -> None:
        _ACCEPTANCE[number] = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        print(_ACCEPTANCE[number])
        assert ok, detail
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[n])
