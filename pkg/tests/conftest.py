import pytest

_LINES = []


@pytest.fixture
def record():
    """Log one acceptance line ``[PASS|FAIL] name: detail`` and return the verdict."""

    def _rec(name, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}"
        _LINES.append(line)
        print(line)
        return passed

    return _rec


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
