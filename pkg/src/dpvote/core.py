"""Rankings, profiles, lotteries and the basic profile statistics.

Alternatives are dense integer indices ``0..m-1``.  A ranking is a tuple
listing the alternatives from most to least preferred.  Names only show up
at the I/O boundary (see :mod:`dpvote.ballots`).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

Ranking = tuple[int, ...]

DEFAULT_ENUMERATION_CAP = 10**6
LOTTERY_SUM_TOL = 1e-12


class EnumerationCapError(ValueError):
    """Raised when an exhaustive enumeration would exceed the size cap."""

    def __init__(self, m: int, n: int, size: int, cap: int):
        self.m, self.n, self.size, self.cap = m, n, size, cap
        super().__init__(
            f"refusing to enumerate (m!)^n = {math.factorial(m)}^{n} = {size} "
            f"profiles (cap is {cap})"
        )


def all_rankings(m: int) -> list[Ranking]:
    """All m! rankings in lexicographic order; the list index is the ranking id."""
    if m < 2:
        raise ValueError(f"need m >= 2 alternatives, got {m}")
    return list(itertools.permutations(range(m)))


def validate_ranking(ranking: Sequence[int], m: int) -> Ranking:
    r = tuple(int(x) for x in ranking)
    if sorted(r) != list(range(m)):
        raise ValueError(f"{r!r} is not a permutation of 0..{m - 1}")
    return r


@dataclass(frozen=True)
class Profile:
    """An ordered collection of n rankings over m alternatives.

    Voter identity matters: neighbouring profiles are defined by replacing
    the vote at one position.
    """

    votes: tuple[Ranking, ...]
    m: int

    def __post_init__(self):
        if self.m < 2:
            raise ValueError(f"need m >= 2 alternatives, got {self.m}")
        if len(self.votes) < 1:
            raise ValueError("a profile needs at least one vote")
        votes = tuple(validate_ranking(v, self.m) for v in self.votes)
        object.__setattr__(self, "votes", votes)

    @classmethod
    def _trusted(cls, votes: tuple[Ranking, ...], m: int) -> "Profile":
        # skips validation; used on the enumeration hot path
        obj = object.__new__(cls)
        object.__setattr__(obj, "votes", votes)
        object.__setattr__(obj, "m", m)
        return obj

    @property
    def n(self) -> int:
        return len(self.votes)

    def permuted(self, sigma: Sequence[int]) -> "Profile":
        """Relabel alternatives: every occurrence of ``a`` becomes ``sigma[a]``."""
        sigma = validate_ranking(sigma, self.m)
        return Profile._trusted(
            tuple(tuple(sigma[x] for x in v) for v in self.votes), self.m
        )

    def replace_vote(self, j: int, ranking: Sequence[int]) -> "Profile":
        votes = list(self.votes)
        votes[j] = validate_ranking(ranking, self.m)
        return Profile._trusted(tuple(votes), self.m)


def unanimous_profile(m: int, n: int) -> Profile:
    """Every voter reports ``0 > 1 > ... > m-1``."""
    return Profile._trusted((tuple(range(m)),) * n, m)


# ---------------------------------------------------------------------------
# lotteries


def as_lottery(probs: Sequence[float], m: int | None = None) -> np.ndarray:
    """Validate and return ``probs`` as a float array summing to one."""
    arr = np.asarray(probs, dtype=float)
    if arr.ndim != 1 or (m is not None and arr.shape[0] != m):
        raise ValueError(f"expected a length-{m} probability vector, got shape {arr.shape}")
    if np.any(arr < 0) or abs(arr.sum() - 1.0) > 1e-9:
        raise ValueError(f"not a probability vector: {arr!r}")
    return arr


def uniform_lottery(m: int) -> np.ndarray:
    return np.full(m, 1.0 / m)


def point_lottery(a: int, m: int) -> np.ndarray:
    out = np.zeros(m)
    out[a] = 1.0
    return out


def permute_lottery(lottery: Sequence[float], sigma: Sequence[int]) -> np.ndarray:
    """The lottery ``sigma . xi``: mass on ``a`` moves to ``sigma[a]``."""
    lottery = np.asarray(lottery)
    out = np.empty_like(lottery)
    out[list(sigma)] = lottery
    return out


# ---------------------------------------------------------------------------
# profile statistics


def position_matrix(p: Profile) -> np.ndarray:
    """``pos[j, a]`` is the rank position of alternative ``a`` for voter ``j`` (0 = top)."""
    pos = np.empty((p.n, p.m), dtype=np.int64)
    for j, vote in enumerate(p.votes):
        pos[j, list(vote)] = np.arange(p.m)
    return pos


def majority_margins(p: Profile) -> np.ndarray:
    """``w[a, b]`` = #voters with a above b minus #voters with b above a."""
    pos = position_matrix(p)
    above = (pos[:, :, None] < pos[:, None, :]).sum(axis=0)
    return (above - above.T).astype(np.int64)


def condorcet_winner(w: np.ndarray) -> int | None:
    m = w.shape[0]
    for a in range(m):
        if all(w[a, b] > 0 for b in range(m) if b != a):
            return a
    return None


def condorcet_loser(w: np.ndarray) -> int | None:
    m = w.shape[0]
    for a in range(m):
        if all(w[a, b] < 0 for b in range(m) if b != a):
            return a
    return None


def borda_scores(p: Profile) -> np.ndarray:
    """Number of alternatives ranked below ``a``, summed over voters."""
    return ((p.m - 1) - position_matrix(p)).sum(axis=0)


def anti_plurality_score(ranking: Sequence[int], a: int) -> int:
    if not 0 <= a < len(ranking):
        raise ValueError(f"alternative {a} out of range for m={len(ranking)}")
    return 0 if ranking[-1] == a else 1


def pareto_dominations(p: Profile) -> set[tuple[int, int]]:
    """Pairs ``(a, b)`` where every voter ranks ``a`` above ``b``."""
    pos = position_matrix(p)
    dom = np.all(pos[:, :, None] < pos[:, None, :], axis=0)
    return {(int(a), int(b)) for a, b in zip(*np.nonzero(dom))}


# ---------------------------------------------------------------------------
# enumeration


def profile_space_size(m: int, n: int) -> int:
    return math.factorial(m) ** n


def check_cap(m: int, n: int, cap: int = DEFAULT_ENUMERATION_CAP) -> int:
    size = profile_space_size(m, n)
    if size > cap:
        raise EnumerationCapError(m, n, size, cap)
    return size


def profile_index(p: Profile) -> int:
    """Position of ``p`` in the order used by :func:`enumerate_profiles`."""
    k = math.factorial(p.m)
    lookup = {r: i for i, r in enumerate(all_rankings(p.m))}
    idx = 0
    for vote in p.votes:
        idx = idx * k + lookup[vote]
    return idx


def profile_at(m: int, n: int, index: int) -> Profile:
    """Inverse of :func:`profile_index`."""
    rankings = all_rankings(m)
    k = len(rankings)
    if not 0 <= index < k**n:
        raise IndexError(index)
    digits = []
    for _ in range(n):
        index, d = divmod(index, k)
        digits.append(d)
    return Profile._trusted(tuple(rankings[d] for d in reversed(digits)), m)


def enumerate_profiles(
    m: int,
    n: int,
    cap: int = DEFAULT_ENUMERATION_CAP,
    start: int = 0,
    stop: int | None = None,
) -> Iterator[Profile]:
    """Yield all (m!)^n profiles in lexicographic order of ranking ids.

    ``start``/``stop`` select a sub-range of the same order so that sweeps can
    be split into independent chunks.
    """
    if n < 1:
        raise ValueError(f"need n >= 1 voters, got {n}")
    size = check_cap(m, n, cap)
    stop = size if stop is None else min(stop, size)
    rankings = all_rankings(m)
    combos = itertools.product(rankings, repeat=n)
    for votes in itertools.islice(combos, start, stop):
        yield Profile._trusted(votes, m)


def neighbors(p: Profile) -> Iterator[Profile]:
    """Every profile obtained by replacing exactly one vote with a different ranking."""
    rankings = all_rankings(p.m)
    for j, vote in enumerate(p.votes):
        for r in rankings:
            if r != vote:
                yield Profile._trusted(p.votes[:j] + (r,) + p.votes[j + 1 :], p.m)


def impartial_culture_votes(m: int, n: int, rng: np.random.Generator) -> tuple[Ranking, ...]:
    """n i.i.d. uniformly random rankings."""
    return tuple(tuple(int(x) for x in rng.permutation(m)) for _ in range(n))
