"""Acceptance criteria AC-1 .. AC-11, one suite each.

Each test prints one PASS/FAIL line; the lines are repeated in the pytest
summary.  Run directly (python3 tests/test_acceptance.py) to print only the lines.
"""
import sys

import pytest

from epsdr.suites import SUITES, safe_run

LINES = []


@pytest.mark.parametrize("name", list(SUITES))
def test_acceptance(name):
    result = safe_run(name)
    line = result.line()
    LINES.append(line)
    print(line)
    assert result.passed, line


if __name__ == "__main__":
    ok = True
    for key in SUITES:
        r = safe_run(key)
        print(r.line(), flush=True)
        ok = ok and r.passed
    sys.exit(0 if ok else 1)
