"""Collects acceptance outcomes and prints one line per criterion."""

from __future__ import annotations

import pytest

_OUTCOMES: dict[int, dict] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    entry = _OUTCOMES.setdefault(number, {"title": title, "failed": [], "seconds": 0.0, "ran": 0})
    if report.when == "call":
        entry["seconds"] += report.duration
        entry["ran"] += 1
    if report.failed:
        entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        entry = _OUTCOMES[number]
        verdict = "FAIL" if entry["failed"] or not entry["ran"] else "PASS"
        line = f"criterion {number:>2}: {verdict}  {entry['title']} ({entry['seconds']:.1f}s)"
        if entry["failed"]:
            line += "  failing: " + ", ".join(entry["failed"])
        terminalreporter.write_line(line)
