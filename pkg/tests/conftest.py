"""Acceptance summary hook.

Tests named test_criterion_* form the acceptance suite; after the run a
terminal section prints one pass/fail line per criterion.
"""

import re

import pytest

_ACCEPTANCE = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if not item.name.startswith("test_criterion_"):
        return
    if rep.when == "call":
        _ACCEPTANCE[item.name] = "pass" if rep.passed else "FAIL"
    elif rep.failed:
        _ACCEPTANCE[item.name] = "ERROR"
    elif rep.when == "setup" and rep.skipped:
        _ACCEPTANCE.setdefault(item.name, "skipped")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, verdict in sorted(_ACCEPTANCE.items()):
        m = re.match(r"test_criterion_(\d+)_(\w+)", name)
        label = f"criterion {int(m.group(1)):2d} {m.group(2)}" if m else name
        terminalreporter.write_line(f"{label}: {verdict}")
