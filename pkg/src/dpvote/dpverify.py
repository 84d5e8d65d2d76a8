"""Exhaustive privacy-loss measurement over neighbouring profiles.

For a finite outcome space the worst event in the DP inequality is always a
single alternative (see :func:`event_ratio_maxima`), so the empirical epsilon
is the largest ``ln p(a) - ln p'(a)`` over ordered neighbouring pairs.  Pairs
are enumerated as "replace vote j", matching fixed-n replacement adjacency.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from dpvote.core import (
    DEFAULT_ENUMERATION_CAP,
    Profile,
    check_cap,
    enumerate_profiles,
    impartial_culture_votes,
    permute_lottery,
    profile_at,
)
from dpvote.mechanisms import LotteryFn, MechanismConfig, MechanismId, lottery_fn

LOG_TOL = 1e-9


class ZeroProbabilityError(ValueError):
    pass


@dataclass
class DpReport:
    configured_epsilon: float | None
    empirical_epsilon: float
    worst_pair: tuple[Profile, Profile, int] | None
    pairs_checked: int
    m: int
    n: int

    @property
    def passed(self) -> bool:
        if self.configured_epsilon is None:
            return True
        return self.empirical_epsilon <= self.configured_epsilon + LOG_TOL

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"


def lottery_table(fn: LotteryFn, m: int, n: int, cap: int = DEFAULT_ENUMERATION_CAP) -> np.ndarray:
    """Lotteries of every profile, row ``i`` for the ``i``-th enumerated profile."""
    check_cap(m, n, cap)
    return np.array([fn(p) for p in enumerate_profiles(m, n, cap=cap)], dtype=float)


def empirical_epsilon(
    mech: "MechanismId | str | LotteryFn",
    cfg: MechanismConfig | None,
    m: int,
    n: int,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> DpReport:
    """Largest log-ratio of exact output probabilities over all neighbouring pairs.

    The argmax is the lexicographically smallest ``(i, i', a)`` among exact
    ties, where ``i`` and ``i'`` are enumeration indices.
    """
    fn = lottery_fn(mech, cfg)
    table = lottery_table(fn, m, n, cap)
    if np.any(table <= 0):
        i, a = map(int, np.argwhere(table <= 0)[0])
        raise ZeroProbabilityError(f"probability {table[i, a]} for alternative {a} on profile {profile_at(m, n, i).votes}")
    logs = np.log(table)
    k = math.factorial(m)
    size = k**n
    idx = np.arange(size)

    best = -np.inf
    best_key: tuple[int, int, int] | None = None
    pairs = 0
    for j in range(n):
        stride = k ** (n - 1 - j)
        digit = (idx // stride) % k
        base = idx - digit * stride
        for delta in range(1, k):
            other = base + ((digit + delta) % k) * stride
            diff = logs - logs[other]
            pairs += size
            top = float(diff.max())
            if top >= best:
                rows, alts = np.nonzero(diff == top)
                key = min(zip(rows.tolist(), other[rows].tolist(), alts.tolist()))
                if top > best or key < best_key:
                    best, best_key = top, key
    cfg_eps = cfg.epsilon if cfg is not None else None
    if best_key is None:
        return DpReport(cfg_eps, 0.0, None, pairs, m, n)
    i, i2, a = best_key
    worst = (profile_at(m, n, i), profile_at(m, n, i2), a)
    return DpReport(cfg_eps, max(best, 0.0), worst, pairs, m, n)


def event_ratio_maxima(l1: Sequence[float], l2: Sequence[float]) -> tuple[float, float]:
    """``(max over non-empty events O of P1(O)/P2(O), max over singletons)``."""
    l1, l2 = np.asarray(l1, float), np.asarray(l2, float)
    if l1.shape != l2.shape:
        raise ValueError("lotteries differ in dimension")
    m = len(l1)

    def ratio(num, den):
        if den == 0:
            return math.inf if num > 0 else 1.0
        return num / den

    single = max(ratio(l1[a], l2[a]) for a in range(m))
    event = single
    for size in range(2, m + 1):
        for subset in itertools.combinations(range(m), size):
            s = list(subset)
            event = max(event, ratio(l1[s].sum(), l2[s].sum()))
    return float(event), float(single)


def singleton_event_sufficiency_check(l1: Sequence[float], l2: Sequence[float], rtol: float = 1e-12) -> bool:
    """True iff the worst event ratio is attained by a single alternative."""
    if len(l1) > 5:
        raise ValueError("exhaustive event check is limited to m <= 5")
    event, single = event_ratio_maxima(l1, l2)
    return math.isclose(event, single, rel_tol=rtol, abs_tol=0.0) or event == single


@dataclass
class NeutralityReport:
    trials: int
    failures: list[tuple[Profile, tuple[int, ...], float]]

    @property
    def passed(self) -> bool:
        return not self.failures


def neutrality_check(
    mech: "MechanismId | str | LotteryFn",
    cfg: MechanismConfig | None,
    m: int = 3,
    n: int = 3,
    trials: int = 50,
    seed: int = 0,
    tol: float = 1e-12,
) -> NeutralityReport:
    """Spot-check ``sigma . f(P) == f(sigma . P)`` on random profiles and permutations."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    fn = lottery_fn(mech, cfg)
    rng = np.random.default_rng(seed)
    failures = []
    for _ in range(trials):
        p = Profile._trusted(impartial_culture_votes(m, n, rng), m)
        sigma = tuple(int(x) for x in rng.permutation(m))
        err = float(np.max(np.abs(fn(p.permuted(sigma)) - permute_lottery(fn(p), sigma))))
        if err > tol:
            failures.append((p, sigma, err))
    return NeutralityReport(trials, failures)
