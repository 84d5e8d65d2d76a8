"""One test per exit criterion; every PASS/FAIL line is echoed in the terminal summary."""

import pytest

from dpvote.acceptance import CRITERIA

RESULTS = []


@pytest.mark.parametrize("check", CRITERIA, ids=[c.__name__ for c in CRITERIA])
def test_criterion(check):
    res = check()
    RESULTS.append(res)
    print(res.line())
    assert res.passed, "\n".join([res.line()] + res.details)
