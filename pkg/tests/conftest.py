import pytest

_verdicts = []


@pytest.fixture
def verdict():
    """Record and print one PASS/FAIL line for an acceptance criterion."""

    def record(number: int, title: str, ok: bool, seconds: float, limit: float, detail: str = ""):
        in_time = seconds < limit
        status = "PASS" if ok and in_time else "FAIL"
        line = f"{status} criterion {number}: {title} ({seconds:.2f}s, limit {limit:g}s)"
        if detail:
            line += f" {detail}"
        if ok and not in_time:
            line += " over time"
        _verdicts.append((number, line))
        print(line)
        return ok and in_time

    return record


def pytest_terminal_summary(terminalreporter):
    if _verdicts:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_verdicts):
            terminalreporter.write_line(line)
