import sys
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"
DATA = Path(__file__).parent / "data"
SCRIPTED_AGENT = FIXTURES / "scripted_agent.py"


def scripted_command(*args: str) -> list:
    return [sys.executable, str(SCRIPTED_AGENT), *args]


@pytest.fixture
def scripted():
    return scripted_command


# -- acceptance reporting -----------------------------------------------------------------

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None or call.when not in ("setup", "call"):
        return
    n, title = mark.args
    failed = call.excinfo is not None
    prev = _CRITERIA.get(n, (title, True))
    if call.when == "call" or failed:
        _CRITERIA[n] = (title, prev[1] and not failed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, ok = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title}")
