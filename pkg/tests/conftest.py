"""Collects acceptance outcomes and prints one line per criterion at the end."""

import pytest

_OUTCOMES = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    prev = _OUTCOMES.get(number, (title, "PASS"))
    if rep.failed or (rep.when == "setup" and rep.skipped):
        _OUTCOMES[number] = (title, "FAIL" if rep.failed else "SKIP")
    elif rep.when == "call" and prev[1] == "PASS":
        _OUTCOMES[number] = (title, "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        title, status = _OUTCOMES[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {title}")
