"""Shared pytest plumbing.

After the run, echo the one-line verdicts collected by the end-to-end
criterion tests (tests/test_acceptance.py) so the final terminal summary
shows the whole release gate at a glance even with output capture on.
"""

from __future__ import annotations

import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    mod = sys.modules.get("test_acceptance") or sys.modules.get(
        "tests.test_acceptance"
    )
    lines = getattr(mod, "VERDICT_LINES", None)
    if lines:
        terminalreporter.section("end-to-end criteria")
        for line in lines:
            terminalreporter.line(line)
