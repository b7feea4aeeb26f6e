import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_RESULTS: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by this test")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if call.when == "setup" and call.excinfo is not None:
        _RESULTS[number] = (title, "ERROR")
    elif call.when == "call":
        _RESULTS[number] = (title, "FAIL" if call.excinfo is not None else "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, outcome = _RESULTS[number]
        terminalreporter.write_line(f"{outcome:5} criterion {number:2d}: {title}")
    passed = sum(1 for _, o in _RESULTS.values() if o == "PASS")
    terminalreporter.write_line(f"{passed}/{len(_RESULTS)} criteria passed")


@pytest.fixture(scope="session")
def demo_data():
    from dialectid.demo import demo_dataset

    return demo_dataset()
