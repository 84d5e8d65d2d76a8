import math

import pytest

from dpvote.core import Profile

A, B, C = 0, 1, 2
LN2 = math.log(2)


def prof(*votes, m=None):
    """Profile from strings such as "abc" (a first)."""
    m = m or len(votes[0])
    return Profile(tuple(tuple(ord(ch) - ord("a") for ch in v) for v in votes), m)


@pytest.fixture
def three_voter():
    return prof("abc", "abc", "bca")


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if not test_acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for res in sorted(test_acceptance.RESULTS, key=lambda r: r.number):
        terminalreporter.write_line(res.line())
        for d in res.details:
            terminalreporter.write_line(f"      {d}")
