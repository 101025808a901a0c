"""Collects acceptance-criterion outcomes and prints one line per criterion."""
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

_outcomes = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is None:
        return
    n = m.args[0]
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        if hasattr(rep, "wasxfail"):
            status = "xfail"
            detail = rep.wasxfail
        elif rep.skipped:
            status, detail = "skip", ""
        else:
            status, detail = rep.outcome, ""
        _outcomes.setdefault(n, []).append((item.name, status, detail))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_outcomes):
        parts = _outcomes[n]
        statuses = {s for _, s, _ in parts}
        if "failed" in statuses:
            verdict = "FAIL"
        elif statuses == {"passed"}:
            verdict = "PASS"
        elif "passed" in statuses:
            verdict = "PASS (partial: known deviation marked xfail)"
        else:
            verdict = "NOT MET (xfail)"
        tr.write_line(f"criterion {n:>2}: {verdict}")
        for name, s, detail in parts:
            if s != "passed":
                tr.write_line(f"    {name}: {s}{' - ' + detail if detail else ''}")
