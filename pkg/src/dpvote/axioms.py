"""Approximate axioms: dominance relations and achieved levels.

The achieved level of an axiom is the best parameter a rule satisfies over
every profile of a given size, found by exhaustive enumeration:

* ``beta``  -- min over Pareto pairs ``(a, b)`` of ``p(a) / p(b)``;
* ``alpha`` -- min over profiles with a Condorcet winner of ``p(cw) / max_{a != cw} p(a)``;
* ``eta``   -- min over profiles with a Condorcet loser of ``min_{a != cl} p(a) / p(cl)``;
* ``gamma`` -- ``1 / max_P t*(P)`` where ``t*`` is the optimum of the
  sup-inf ratio program built by :func:`sd_program`.

The gamma program: for a fixed profile and lottery ``p``, maximise ``t`` over
lotteries ``xi`` subject to ``sum_{x above y for voter j} xi(x) >= t * c[j, y]``
with ``c[j, y]`` the same sum under ``p``.  The denominators are constants, so
it is a linear program in ``(xi, t)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from dpvote import simplex
from dpvote.core import (
    DEFAULT_ENUMERATION_CAP,
    Profile,
    check_cap,
    condorcet_loser,
    condorcet_winner,
    enumerate_profiles,
    majority_margins,
    pareto_dominations,
    point_lottery,
    unanimous_profile,
)
from dpvote.mechanisms import LotteryFn, MechanismConfig, MechanismId, lottery_fn

DOMINANCE_TOL = 1e-12


# ---------------------------------------------------------------------------
# pairwise lottery relations


def upper_set_sums(lot: Sequence[float], ranking: Sequence[int]) -> np.ndarray:
    """``out[k]`` = mass on the alternatives strictly above ``ranking[k]``."""
    ordered = np.asarray(lot, dtype=float)[list(ranking)]
    return np.concatenate(([0.0], np.cumsum(ordered)[:-1]))


def sd_dominates(xi, zeta, ranking, gamma: float = 1.0, tol: float = DOMINANCE_TOL) -> bool:
    """Weak gamma-SD relation for one voter: every upper-set sum of ``xi`` is at
    least ``1/gamma`` times that of ``zeta``.  ``gamma = 1`` is plain SD."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    return bool(np.all(upper_set_sums(xi, ranking) >= upper_set_sums(zeta, ranking) / gamma - tol))


def pc_sums(xi, zeta, ranking) -> tuple[float, float]:
    """``(sum_{x>y} xi(x) zeta(y), sum_{x>y} zeta(x) xi(y))`` for one voter."""
    xi_o = np.asarray(xi, dtype=float)[list(ranking)]
    ze_o = np.asarray(zeta, dtype=float)[list(ranking)]
    # rows are the better alternative in ranking order
    upper = np.triu(np.ones((len(xi_o), len(xi_o))), k=1)
    return float(xi_o @ upper @ ze_o), float(ze_o @ upper @ xi_o)


def pc_dominates(xi, zeta, ranking, kappa: float = 1.0, tol: float = DOMINANCE_TOL) -> bool:
    """Weak kappa-PC relation for one voter."""
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    lhs, rhs = pc_sums(xi, zeta, ranking)
    return lhs >= rhs / kappa - tol


def pc_strictly_dominates_profile(xi, zeta, p: Profile, kappa: float) -> bool:
    """Weak kappa-PC dominance for every voter, and the reverse relation fails for some voter."""
    weak = all(pc_dominates(xi, zeta, v, kappa) for v in p.votes)
    return weak and any(not pc_dominates(zeta, xi, v, kappa) for v in p.votes)


# ---------------------------------------------------------------------------
# the sup-inf program


@dataclass(frozen=True)
class SdRow:
    voter: int
    threshold: int
    upper: frozenset[int]
    constant: float


@dataclass(frozen=True)
class SdProgram:
    target: np.ndarray
    rows: tuple[SdRow, ...]
    m: int


@dataclass(frozen=True)
class SdSolution:
    t: float
    xi: np.ndarray
    program: SdProgram


def sd_program(p: Profile, lot: Sequence[float]) -> SdProgram:
    """One row per (voter, threshold alternative) with a non-empty upper set and
    a positive constant; the rest say ``0 >= t * 0``."""
    target = np.asarray(lot, dtype=float)
    rows = []
    for j, vote in enumerate(p.votes):
        for k in range(1, p.m):
            upper = frozenset(vote[:k])
            const = float(target[list(vote[:k])].sum())
            if const > 0:
                rows.append(SdRow(j, vote[k], upper, const))
    return SdProgram(target=target, rows=tuple(rows), m=p.m)


def solve_sd_program(prog: SdProgram, exact: bool = False) -> SdSolution:
    """Maximise ``t`` over ``(xi, t)``; variables are ``xi_0..xi_{m-1}, t``.

    ``sum(xi) = 1`` is relaxed to ``<= 1``: raising any ``xi`` only loosens the
    rows, so the optimum is unchanged and leftover mass is spread back.
    """
    m = prog.m
    # identical upper sets give identical rows
    seen: dict[frozenset[int], float] = {}
    for row in prog.rows:
        seen.setdefault(row.upper, row.constant)
    conv = Fraction if exact else float
    A, b = [], []
    for upper, const in seen.items():
        A.append([-conv(1) if x in upper else conv(0) for x in range(m)] + [conv(const)])
        b.append(conv(0))
    A.append([conv(1)] * m + [conv(0)])
    b.append(conv(1))
    c = [conv(0)] * m + [conv(1)]
    sol = simplex.maximize(c, A, b, tol=0 if exact else 1e-12)
    xi = np.array([float(v) for v in sol.x[:m]])
    xi = np.clip(xi, 0.0, None)
    xi += (1.0 - xi.sum()) / m
    return SdSolution(t=float(sol.value), xi=xi, program=prog)


def sd_optimal_ratio(p: Profile, lot: Sequence[float], exact: bool = False) -> float:
    """Optimal value of the sup-inf ratio program (always ``>= 1``)."""
    return solve_sd_program(sd_program(p, lot), exact=exact).t


def sd_ratio_of(prog: SdProgram, xi: Sequence[float]) -> float:
    """Inner inf of the program for a given candidate ``xi``."""
    xi = np.asarray(xi, dtype=float)
    if not prog.rows:
        return math.inf
    return min(xi[list(r.upper)].sum() / r.constant for r in prog.rows)


# ---------------------------------------------------------------------------
# achieved levels

LEVEL_NAMES = ("alpha", "beta", "gamma", "eta")


@dataclass
class AchievedLevels:
    m: int
    n: int
    alpha: float | None = None
    beta: float | None = None
    gamma: float | None = None
    eta: float | None = None
    per_profile_witnesses: dict[str, Profile] = field(default_factory=dict)
    profiles_checked: int = 0
    empirical_epsilon: float | None = None

    def get(self, name: str) -> float | None:
        return getattr(self, name)


@dataclass
class _Partial:
    # running extremum per level: (value, profile index, profile)
    best: dict[str, tuple[float, int, Profile]] = field(default_factory=dict)
    count: int = 0

    def offer(self, name: str, value: float, idx: int, p: Profile, minimise: bool) -> None:
        cur = self.best.get(name)
        better = cur is None or (value < cur[0] if minimise else value > cur[0])
        if better or (value == cur[0] and idx < cur[1]):
            self.best[name] = (value, idx, p)

    def merge(self, other: "_Partial") -> None:
        for name, (value, idx, p) in other.best.items():
            self.offer(name, value, idx, p, minimise=name != "gamma")
        self.count += other.count


def profile_levels(p: Profile, lot: np.ndarray, which: Sequence[str] = LEVEL_NAMES, exact: bool = False) -> dict[str, float]:
    """Per-profile contributions to each level; missing keys mean "not applicable".

    ``gamma`` here is the raw program optimum ``t*``; the level is its reciprocal.
    """
    out: dict[str, float] = {}
    w = None
    if "alpha" in which or "eta" in which:
        w = majority_margins(p)
    if "alpha" in which:
        cw = condorcet_winner(w)
        if cw is not None:
            out["alpha"] = float(lot[cw] / np.delete(lot, cw).max())
    if "eta" in which:
        cl = condorcet_loser(w)
        if cl is not None:
            out["eta"] = float(np.delete(lot, cl).min() / lot[cl])
    if "beta" in which:
        pairs = pareto_dominations(p)
        if pairs:
            out["beta"] = float(min(lot[a] / lot[b] for a, b in pairs))
    if "gamma" in which:
        out["gamma"] = sd_optimal_ratio(p, lot, exact=exact)
    return out


def _levels_chunk(args) -> _Partial:
    fn, m, n, cap, start, stop, which, exact = args
    part = _Partial()
    for offset, p in enumerate(enumerate_profiles(m, n, cap=cap, start=start, stop=stop)):
        lot = fn(p)
        if np.any(lot <= 0):
            raise ValueError(f"lottery without full support on profile {p.votes}")
        for name, value in profile_levels(p, lot, which, exact=exact).items():
            part.offer(name, value, start + offset, p, minimise=name != "gamma")
        part.count += 1
    return part


def _mechanism_callable(mech, cfg):
    # picklable stand-in for lottery_fn(mech, cfg) when fanning out to processes
    if isinstance(mech, (str, MechanismId)):
        return _NamedRule(MechanismId.parse(mech), cfg)
    return mech


@dataclass(frozen=True)
class _NamedRule:
    mech: MechanismId
    cfg: MechanismConfig

    def __call__(self, p: Profile) -> np.ndarray:
        return lottery_fn(self.mech, self.cfg)(p)


def achieved_levels(
    mech: "MechanismId | str | LotteryFn",
    cfg: MechanismConfig | None,
    m: int,
    n: int,
    which: Sequence[str] = LEVEL_NAMES,
    cap: int = DEFAULT_ENUMERATION_CAP,
    threads: int = 1,
    exact: bool = False,
) -> AchievedLevels:
    """Measure the requested levels of a rule over all (m!)^n profiles.

    ``threads > 1`` splits the profile order into contiguous chunks handled by
    worker processes; merging keeps the earliest witness on ties so the result
    does not depend on the split.
    """
    unknown = set(which) - set(LEVEL_NAMES)
    if unknown:
        raise ValueError(f"unknown levels {sorted(unknown)}")
    size = check_cap(m, n, cap)
    fn = _mechanism_callable(mech, cfg)
    if threads <= 1:
        parts = [_levels_chunk((fn, m, n, cap, 0, size, tuple(which), exact))]
    else:
        bounds = np.linspace(0, size, threads + 1).astype(int)
        jobs = [(fn, m, n, cap, int(s), int(e), tuple(which), exact) for s, e in zip(bounds[:-1], bounds[1:]) if e > s]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_levels_chunk, jobs))
    total = _Partial()
    for part in parts:
        total.merge(part)

    out = AchievedLevels(m=m, n=n, profiles_checked=total.count)
    for name in which:
        if name not in total.best:
            continue
        value, _, p = total.best[name]
        setattr(out, name, 1.0 / value if name == "gamma" else value)
        out.per_profile_witnesses[name] = p
    return out


def achieved_gamma(mech, cfg, m, n, **kw) -> float:
    return achieved_levels(mech, cfg, m, n, which=("gamma",), **kw).gamma


def achieved_beta(mech, cfg, m, n, **kw) -> float | None:
    return achieved_levels(mech, cfg, m, n, which=("beta",), **kw).beta


def achieved_alpha(mech, cfg, m, n, **kw) -> float | None:
    return achieved_levels(mech, cfg, m, n, which=("alpha",), **kw).alpha


def achieved_eta(mech, cfg, m, n, **kw) -> float | None:
    return achieved_levels(mech, cfg, m, n, which=("eta",), **kw).eta


# ---------------------------------------------------------------------------
# kappa-PC impossibility certificate


@dataclass
class PcCertificate:
    profile: Profile
    lottery: np.ndarray
    kappa: float
    weak_margins: list[float]  # per voter: lhs - rhs / kappa, needs >= 0
    reverse_margins: list[float]  # per voter: lhs / kappa - rhs, > 0 means reverse relation fails
    certified: bool
    degenerate: bool

    @property
    def note(self) -> str:
        if self.degenerate:
            return "degenerate, not a DP lottery"
        return "certified" if self.certified else "not certified"


def pc_impossibility_witness(mech, cfg, m: int, n: int, kappa: float) -> PcCertificate:
    """Check that the point lottery on alternative 0 strictly kappa-PC-dominates
    the rule's output on the unanimous profile ``0 > 1 > ... > m-1``."""
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    p = unanimous_profile(m, n)
    lot = np.asarray(lottery_fn(mech, cfg)(p), dtype=float)
    top = point_lottery(0, m)
    weak, rev = [], []
    for vote in p.votes:
        lhs, rhs = pc_sums(top, lot, vote)
        weak.append(lhs - rhs / kappa)
        rev.append(lhs / kappa - rhs)
    certified = all(w >= -DOMINANCE_TOL for w in weak) and any(r > DOMINANCE_TOL for r in rev)
    degenerate = all(abs(w) <= DOMINANCE_TOL for w in weak) and all(abs(r) <= DOMINANCE_TOL for r in rev)
    return PcCertificate(p, lot, kappa, weak, rev, certified and not degenerate, degenerate)
