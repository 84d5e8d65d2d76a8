import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import A, B, C, prof
from dpvote.core import (
    EnumerationCapError,
    Profile,
    all_rankings,
    anti_plurality_score,
    borda_scores,
    condorcet_loser,
    condorcet_winner,
    enumerate_profiles,
    majority_margins,
    neighbors,
    pareto_dominations,
    permute_lottery,
    profile_at,
    profile_index,
    profile_space_size,
)


def test_margins_three_voter(three_voter):
    w = majority_margins(three_voter)
    assert (w[A, B], w[A, C], w[B, C]) == (1, 1, 3)


def test_margins_single_voter():
    w = majority_margins(prof("abc"))
    assert (w[A, B], w[A, C], w[B, C]) == (1, 1, 1)


def test_margins_reversal_is_zero():
    assert not majority_margins(prof("abc", "cba")).any()


def test_condorcet_examples(three_voter):
    w = majority_margins(three_voter)
    assert condorcet_winner(w) == A
    assert condorcet_loser(w) == C
    assert condorcet_winner(np.zeros((3, 3), int)) is None
    assert condorcet_loser(np.zeros((3, 3), int)) is None
    assert condorcet_loser(majority_margins(prof("abc"))) == C


def test_condorcet_cycle():
    w = np.array([[0, 1, -1], [-1, 0, 1], [1, -1, 0]])
    assert condorcet_winner(w) is None
    assert condorcet_loser(w) is None
    p = prof("abc", "bca", "cab")
    assert condorcet_winner(majority_margins(p)) is None


def test_borda_examples():
    assert list(borda_scores(prof("abc", "abc"))) == [4, 2, 0]
    assert list(borda_scores(prof("abc"))) == [2, 1, 0]
    assert list(borda_scores(prof("abc", "cba"))) == [2, 2, 2]


def test_anti_plurality():
    assert anti_plurality_score((A, B, C), C) == 0
    assert anti_plurality_score((A, B, C), A) == 1
    assert anti_plurality_score((0, 1), 1) == 0


def test_pareto_examples():
    assert pareto_dominations(prof("abc")) == {(A, B), (A, C), (B, C)}
    assert pareto_dominations(prof("abc", "cba")) == set()
    assert pareto_dominations(prof("abc", "acb")) == {(A, B), (A, C)}


def test_profile_validation():
    with pytest.raises(ValueError):
        Profile(((0, 0, 1),), 3)
    with pytest.raises(ValueError):
        Profile(((0, 1),), 3)
    with pytest.raises(ValueError):
        Profile((), 3)
    with pytest.raises(ValueError):
        Profile(((0,),), 1)


def test_enumeration_counts():
    assert sum(1 for _ in enumerate_profiles(2, 2)) == 4
    assert sum(1 for _ in enumerate_profiles(3, 3)) == 216
    assert profile_space_size(3, 8) == 6**8


def test_enumeration_cap_refuses():
    with pytest.raises(EnumerationCapError):
        next(iter(enumerate_profiles(3, 8)))


def test_enumeration_order_lexicographic():
    rankings = all_rankings(3)
    assert rankings == sorted(rankings)
    profs = list(enumerate_profiles(3, 2))
    assert [tuple(rankings.index(v) for v in p.votes) for p in profs] == sorted(itertools.product(range(6), repeat=2))
    for i, p in enumerate(profs):
        assert profile_index(p) == i
        assert profile_at(3, 2, i) == p


def test_neighbor_counts_and_symmetry():
    assert len(list(neighbors(prof("ab")))) == 1
    profs = list(enumerate_profiles(3, 2))
    nb = {p: set(neighbors(p)) for p in profs}
    for p in profs:
        assert len(nb[p]) == 2 * 5
        assert p not in nb[p]
        for q in nb[p]:
            assert p in nb[q]
            assert sum(x != y for x, y in zip(p.votes, q.votes)) == 1
    assert all(len(list(neighbors(p))) == 15 for p in enumerate_profiles(3, 3))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_profile_invariants(n):
    for p in enumerate_profiles(3, n):
        w = majority_margins(p)
        assert (w == -w.T).all()
        cw, cl = condorcet_winner(w), condorcet_loser(w)
        assert cw is None or cw != cl
        for a, b in pareto_dominations(p):
            assert w[a, b] == n
        assert borda_scores(p).sum() == n * 3 * 2 // 2


votes_m4 = st.lists(st.permutations(range(4)).map(tuple), min_size=1, max_size=6)


@settings(max_examples=200, deadline=None)
@given(votes=votes_m4, sigma=st.permutations(range(4)).map(tuple))
def test_relabel_covariance(votes, sigma):
    p = Profile(tuple(votes), 4)
    q = p.permuted(sigma)
    w, wq = majority_margins(p), majority_margins(q)
    inv = np.argsort(sigma)
    assert (wq == w[np.ix_(inv, inv)]).all()
    assert np.array_equal(borda_scores(q), permute_lottery(borda_scores(p), sigma))
    cw, cl = condorcet_winner(w), condorcet_loser(w)
    assert condorcet_winner(wq) == (None if cw is None else sigma[cw])
    assert condorcet_loser(wq) == (None if cl is None else sigma[cl])
    assert pareto_dominations(q) == {(sigma[a], sigma[b]) for a, b in pareto_dominations(p)}
