"""Exit criteria, runnable from ``dpvote selfcheck`` and from the test suite.

Each check returns a :class:`CriterionResult` with a one-line verdict plus
detail lines for anything that failed or needs to be read (e.g. the BordaEXP
listed-level comparison, which is reported rather than judged).
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from dpvote import bounds, experiments
from dpvote.axioms import AchievedLevels, achieved_levels, pc_impossibility_witness, sd_optimal_ratio, sd_program
from dpvote.bounds import BoundId
from dpvote.core import (
    condorcet_winner,
    enumerate_profiles,
    majority_margins,
    point_lottery,
    uniform_lottery,
)
from dpvote.dpverify import empirical_epsilon
from dpvote.mechanisms import MechanismConfig, MechanismId

M, N = 3, 3
EPSILONS = (0.1, math.log(2), 1.0)
MIXTURE_OMEGA = 0.5
# regression value from the enumerator: 216 profiles minus 12 majority cycles
CW_PROFILES_M3_N3 = 204


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    details: list[str] = field(default_factory=list)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number:2d}: {self.title}"


def _cfg(eps: float, omega: float = MIXTURE_OMEGA) -> MechanismConfig:
    return MechanismConfig(epsilon=eps, omega=omega)


@functools.lru_cache(maxsize=None)
def _levels(mech: MechanismId, eps: float, n: int, omega: float = MIXTURE_OMEGA) -> AchievedLevels:
    return achieved_levels(mech, _cfg(eps, omega), M, n)


def _fmt(eps: float) -> str:
    return "ln2" if eps == math.log(2) else f"{eps:g}"


def criterion_1() -> CriterionResult:
    bad = []
    for eps, mech in itertools.product(EPSILONS, MechanismId):
        rep = empirical_epsilon(mech, _cfg(eps), M, N)
        if rep.empirical_epsilon > eps + 1e-9:
            bad.append(f"{mech.value} eps={_fmt(eps)}: empirical {rep.empirical_epsilon!r} exceeds budget")
        if mech in (MechanismId.CWRR, MechanismId.CLRR) and abs(rep.empirical_epsilon - eps) > 1e-9:
            bad.append(f"{mech.value} eps={_fmt(eps)}: empirical {rep.empirical_epsilon!r} not tight")
    return CriterionResult(1, "DP exactness over all neighbouring pairs (m=3, n=3)", not bad, bad)


def criterion_2() -> CriterionResult:
    bad = []
    for eps, n in itertools.product(EPSILONS, (1, 2, 3)):
        lower = bounds.two_way_bound(BoundId.ParetoLower, M, n, eps)
        upper = bounds.two_way_bound(BoundId.ParetoUpper, M, n, eps)
        beta = _levels(MechanismId.BordaEXP, eps, n).beta
        if beta < lower - 1e-9:
            bad.append(f"BordaEXP n={n} eps={_fmt(eps)}: beta {beta} < {lower}")
        for mech in MechanismId:
            b = _levels(mech, eps, n).beta
            if b > upper + 1e-9:
                bad.append(f"{mech.value} n={n} eps={_fmt(eps)}: beta {b} > upper {upper}")
    return CriterionResult(2, "BordaEXP beta lower bound; beta upper bound for every rule", not bad, bad)


def criterion_3() -> CriterionResult:
    bad = []
    for eps in EPSILONS:
        lower = bounds.two_way_bound(BoundId.SdLower, M, N, eps)
        upper = bounds.two_way_bound(BoundId.SdUpper, M, N, eps)
        lv = _levels(MechanismId.RDAnti, eps, N)
        if lv.gamma < lower - 1e-6:
            w = lv.per_profile_witnesses["gamma"]
            bad.append(f"RDAnti eps={_fmt(eps)}: gamma {lv.gamma:.12g} < {lower:.12g} (witness {list(w.votes)})")
        for mech in MechanismId:
            g = _levels(mech, eps, N).gamma
            if g > upper + 1e-9:
                bad.append(f"{mech.value} eps={_fmt(eps)}: gamma {g} > upper {upper}")
    return CriterionResult(3, "RD-Anti gamma lower bound; gamma upper bound for every rule", not bad, bad)


def criterion_4() -> CriterionResult:
    bad = []
    for eps in EPSILONS:
        a = _levels(MechanismId.CWRR, eps, N).alpha
        e = _levels(MechanismId.CLRR, eps, N).eta
        if abs(a - math.exp(eps)) > 1e-9:
            bad.append(f"CWRR eps={_fmt(eps)}: alpha {a} != e^eps")
        if abs(e - math.exp(eps)) > 1e-9:
            bad.append(f"CLRR eps={_fmt(eps)}: eta {e} != e^eps")
    return CriterionResult(4, "CWRR alpha = e^eps and CLRR eta = e^eps", not bad, bad)


def criterion_5() -> CriterionResult:
    bad = []
    for eps, omega in itertools.product((0.5, math.log(2), 1.0), (0.0, 0.25, 0.5, 0.75, 1.0)):
        lv = _levels(MechanismId.Mixture, eps, N, omega)
        prod = lv.alpha * lv.eta
        if abs(prod - math.exp(eps)) > 1e-6:
            bad.append(f"omega={omega} eps={_fmt(eps)}: alpha*eta = {prod} != {math.exp(eps)}")
    return CriterionResult(5, "mixture alpha*eta = e^eps", not bad, bad)


def criterion_6() -> CriterionResult:
    bad = []
    for eps, mech, kappa in itertools.product(EPSILONS, MechanismId, (1.0, 10.0, 1e6)):
        cert = pc_impossibility_witness(mech, _cfg(eps), M, N, kappa)
        if not cert.certified or not max(cert.reverse_margins) > 0:
            bad.append(f"{mech.value} eps={_fmt(eps)} kappa={kappa:g}: {cert.note}")
    return CriterionResult(6, "point lottery on the top choice strictly kappa-PC-dominates every output", not bad, bad)


def criterion_7() -> CriterionResult:
    bad = []
    count = 0
    for p in enumerate_profiles(M, N):
        cw = condorcet_winner(majority_margins(p))
        if cw is None:
            continue
        count += 1
        t = sd_optimal_ratio(p, point_lottery(cw, M))
        if abs(t - 1.0) > 1e-9:
            bad.append(f"{list(p.votes)}: t* = {t}")
    if count != CW_PROFILES_M3_N3:
        bad.append(f"{count} profiles with a Condorcet winner, expected {CW_PROFILES_M3_N3}")
    return CriterionResult(7, f"Condorcet method is SD-efficient on all {count} CW profiles", not bad, bad)


def criterion_8() -> CriterionResult:
    bad = []
    for eps, mech in itertools.product(EPSILONS, MechanismId):
        lv = _levels(mech, eps, N)
        for combo in bounds.THREE_WAY:
            r = bounds.three_way_check(combo, lv, M, N, eps)
            if not r.applicable:
                bad.append(f"{mech.value} eps={_fmt(eps)} {combo.value}: not applicable ({r.reason})")
            elif r.slack < -1e-9:
                bad.append(f"{mech.value} eps={_fmt(eps)} {combo.value}: value {r.value:.6g} above bound {r.threshold:.6g}")
    return CriterionResult(8, "measured levels satisfy all six three-way upper bounds", not bad, bad)


def _grid_optimum(prog, step: float = 1e-2) -> float:
    k = int(round(1 / step))
    i, j = np.meshgrid(np.arange(k + 1), np.arange(k + 1), indexing="ij")
    keep = i + j <= k
    xi = np.stack([i[keep], j[keep], k - i[keep] - j[keep]], axis=1) / k
    ratio = np.full(len(xi), np.inf)
    for row in prog.rows:
        ratio = np.minimum(ratio, xi[:, sorted(row.upper)].sum(axis=1) / row.constant)
    return float(ratio.max())


def criterion_9() -> CriterionResult:
    bad = []
    lot = uniform_lottery(M)
    for p in enumerate_profiles(M, N):
        prog = sd_program(p, lot)
        lp = sd_optimal_ratio(p, lot)
        grid = _grid_optimum(prog)
        if grid > lp + 1e-9 or lp > grid + 0.02:
            bad.append(f"{list(p.votes)}: LP {lp} vs grid {grid}")
    return CriterionResult(9, "LP optimum matches simplex-grid search on all 216 profiles", not bad, bad)


def _recompute(row: experiments.CurveRow, m: int, n: int) -> float:
    """Each plotted formula written out again, independently of the sweep code."""
    E = math.exp(n * row.epsilon)
    x = row.x_value
    s = row.sweep
    if s == "fig3":
        return math.exp(n * row.epsilon / (m - 1)) if row.series == "upper" else math.exp(n * row.epsilon / (2 * m - 2))
    if s == "fig4":
        k = (m - 1) * (E if row.series == "upper" else math.exp(row.epsilon))
        return k / (k + 1)
    if s == "fig5":
        return math.exp(row.epsilon) / x
    if s == "fig6":
        return (x + m - 1 - x * math.exp(-n * row.epsilon)) / (x + m - 1)
    if s == "fig7":
        return (E - x) / E
    if s == "fig8":
        if x == 1:
            return (m - 2) * E / ((m - 2) * E + 1)
        return (E - E * x ** (2 - m)) / (E - E * x ** (2 - m) + x - 1)
    raise ValueError(s)


def criterion_10() -> CriterionResult:
    bad = []
    m, n = 5, 10
    for fig in (3, 4, 5, 6, 7, 8):
        rows = experiments.figure_rows(fig, m, n)
        bad += [f"fig{fig} epsilon ordering: {v}" for v in experiments.epsilon_order_violations(rows)[:3]]
        for r in rows:
            nn = int(r.series.split(" n=")[1]) if " n=" in r.series else n
            want = _recompute(r, m, nn)
            if not math.isclose(r.y_value, want, rel_tol=1e-12, abs_tol=1e-12):
                bad.append(f"fig{fig} {r.series} x={r.x_value}: {r.y_value} vs recomputed {want}")
                break
        if fig == 8:
            bad += [f"fig8 n ordering: {v}" for v in experiments.n_order_violations(rows, n, 2 * n)[:3]]
    return CriterionResult(10, "figure data: epsilon and n orderings, exact recomputation", not bad, bad)


def criterion_11() -> CriterionResult:
    bad, report = [], []
    for eps in EPSILONS:
        for mech in (MechanismId.CWRR, MechanismId.CLRR, MechanismId.RDAnti):
            lv = _levels(mech, eps, N)
            for axiom in bounds.LOWER_BOUND_AXIOMS:
                cell = bounds.mechanism_lower_bound(mech, axiom, M, N, eps)
                got = lv.get(axiom)
                if got < cell.value - 1e-6:
                    bad.append(f"{mech.value} {axiom} eps={_fmt(eps)}: measured {got:.12g} < listed {cell.value:.12g}")
        lv = _levels(MechanismId.BordaEXP, eps, N)
        for axiom in bounds.LOWER_BOUND_AXIOMS:
            cell = bounds.mechanism_lower_bound(MechanismId.BordaEXP, axiom, M, N, eps)
            got = lv.get(axiom)
            tag = "epsilon_suspect " if cell.epsilon_suspect else ""
            rel = "meets" if got >= cell.value - 1e-6 else "below"
            report.append(f"BordaEXP {axiom} eps={_fmt(eps)}: {tag}listed {cell.value:.6g}, measured {got:.6g} ({rel})")
    return CriterionResult(11, "listed lower bounds for CWRR/CLRR/RD-Anti; BordaEXP comparison report", not bad, bad + report)


CRITERIA: tuple[Callable[[], CriterionResult], ...] = (
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
    criterion_7, criterion_8, criterion_9, criterion_10, criterion_11,
)


def run_all(echo: Callable[[str], None] | None = print) -> list[CriterionResult]:
    results = []
    for check in CRITERIA:
        res = check()
        results.append(res)
        if echo:
            echo(res.line())
            for d in res.details:
                echo(f"      {d}")
    return results
