"""Shared test plumbing: acceptance verdict collection and reporting."""
from __future__ import annotations

import sys
import time
from contextlib import contextmanager

ACCEPTANCE_VERDICTS: list[str] = []


@contextmanager
def criterion(number: int, label: str, tag: str = "C"):
    """Record one acceptance verdict line; re-raise on failure."""
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        line = f"[{tag}{number:02d} FAIL] {label}"
        ACCEPTANCE_VERDICTS.append(line)
        print(line, file=sys.__stdout__, flush=True)
        raise
    elapsed = time.perf_counter() - start
    line = f"[{tag}{number:02d} PASS] {label} ({elapsed:.2f}s)"
    ACCEPTANCE_VERDICTS.append(line)
    print(line, file=sys.__stdout__, flush=True)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_VERDICTS):
        terminalreporter.write_line(line)
