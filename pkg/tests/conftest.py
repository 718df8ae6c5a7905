import pytest

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record one acceptance line and echo it; ``ok=None`` skips, ``False`` fails."""

    def record(label: str, ok: bool | None, detail: str):
        status = "SKIP" if ok is None else "PASS" if ok else "FAIL"
        line = f"{label} {status}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        if ok is None:
            pytest.skip(detail)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
