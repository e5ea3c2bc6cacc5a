import pytest

from qbilat.numeric import PrecisionContext

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def ctx():
    return PrecisionContext(256)


@pytest.fixture
def acceptance_log():
    """Collects one summary line per acceptance criterion for the terminal report."""
    return _ACCEPTANCE_LINES.append


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
