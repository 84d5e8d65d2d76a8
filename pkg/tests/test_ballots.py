import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import prof
from dpvote.ballots import BallotFormatError, format_ballots, format_profile_inline, parse_ballots
from dpvote.core import Profile


def test_named_ballots():
    p, names = parse_ballots("a>b>c\na > b > c\n\nb>c>a\n")
    assert names == ["a", "b", "c"]
    assert p == prof("abc", "abc", "bca")


def test_names_sorted_not_first_seen():
    p, names = parse_ballots("zed>amy\namy>zed\n")
    assert names == ["amy", "zed"]
    assert p.votes == ((1, 0), (0, 1))


def test_count_lines_with_names_and_header():
    text = "# m=3 n=3\n# ALTERNATIVE NAME 1: x\n# ALTERNATIVE NAME 2: y\n# ALTERNATIVE NAME 3: z\n2: 1,2,3\n1: 3,1,2\n"
    p, names = parse_ballots(text)
    assert names == ["x", "y", "z"]
    assert p.votes == ((0, 1, 2), (0, 1, 2), (2, 0, 1))


def test_count_lines_default_names():
    _, names = parse_ballots("1: 2,1\n")
    assert names == ["1", "2"]


@pytest.mark.parametrize("text", [
    "a>b>c\na>b\n",  # missing alternative
    "a>b>a\n",  # repeat
    "a>{b,c}\n",  # tie group
    "a=b>c\n",
    "a>b>c\n1: 1,2,3\n",  # mixed formats
    "1: 1,2,2\n",
    "1: 1,x,3\n",
    "# m=3 n=2\na>b>c\n",  # header mismatch
    "\n# only a comment\n",
    "a\n",
    "a>>b\n",
])
def test_rejects(text):
    with pytest.raises(BallotFormatError):
        parse_ballots(text)


def test_error_carries_line_number():
    with pytest.raises(BallotFormatError) as exc:
        parse_ballots("a>b>c\nb>a\n")
    assert exc.value.lineno == 2


rankings = st.permutations(range(4)).map(tuple)


@settings(max_examples=100, deadline=None)
@given(st.lists(rankings, min_size=1, max_size=8))
def test_round_trip(votes):
    p = Profile(tuple(votes), 4)
    q, names = parse_ballots(format_ballots(p))
    assert q == p and names == ["a", "b", "c", "d"]


def test_inline_format():
    assert format_profile_inline(prof("abc", "cba")) == "a>b>c; c>b>a"
