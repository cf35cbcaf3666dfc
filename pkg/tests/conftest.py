import pytest

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record the verdict of one acceptance criterion; printed at the end of the run."""

    def record(number: int, ok: bool, note: str = "") -> bool:
        ACCEPTANCE[number] = (ok, note)
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} {note}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, note = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {note}")
