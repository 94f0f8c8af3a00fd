"""Every acceptance criterion at full size, against its time limit.

One PASS/FAIL line per criterion is printed in the terminal summary.
"""

import pytest

from dualforge.acceptance import CRITERIA, run_criterion

RESULTS = []


@pytest.mark.parametrize("number", [c[0] for c in CRITERIA],
                         ids=[f"criterion-{c[0]}" for c in CRITERIA])
def test_criterion(number):
    r = run_criterion(number)
    RESULTS.append(r)
    print(r.line())
    assert r.ok, r.detail
    assert r.seconds < r.limit, f"took {r.seconds:.2f}s, limit {r.limit}s"
