import pytest

ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def record():
    """Register one acceptance verdict; printed in the terminal summary."""
    def _record(name: str, ok: bool, detail: str = ""):
        ACCEPTANCE.append((name, bool(ok), detail))
        print(f"{name}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{name}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
