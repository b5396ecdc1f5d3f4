"""Per-criterion PASS/FAIL summary for tests marked ``criterion(k)``."""
from __future__ import annotations

import pytest

_results: dict[int, list[tuple[str, bool]]] = {}
_titles: dict[int, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion a test belongs to")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            number, title = mark.args
            _titles[number] = title
            item.stash[_key] = number


_key = pytest.StashKey[int]()


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    report = yield
    number = item.stash.get(_key, None)
    if number is not None and (report.when == "call" or report.failed):
        _results.setdefault(number, []).append((item.name, report.passed))
    return report


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_results):
        outcomes = _results[number]
        ok = all(passed for _, passed in outcomes)
        tr.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {_titles[number]}")
        for name, passed in outcomes:
            if not passed:
                tr.write_line(f"    failed: {name}")
