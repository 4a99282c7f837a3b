"""The twelve acceptance criteria at their stated tolerances.

Each criterion prints one [PASS]/[FAIL] line; the lines are repeated in the
terminal summary.
"""

import pytest

from antikz import acceptance

LINES = []


@pytest.mark.parametrize("number", [c[0] for c in acceptance.CRITERIA],
                         ids=[f"AC{c[0]:02d}" for c in acceptance.CRITERIA])
def test_criterion(number):
    r = acceptance.run_one(number)
    line = r.line()
    LINES.append(line)
    print(line)
    assert r.passed, line
