"""Curve sweeps behind the tradeoff figures, plus profile generators.

Figures are reproduced as data.  Figure ids:

* 2 -- every three-way bound as a function of epsilon, partner level fixed at 1;
* 3, 4 -- upper/lower two-way bounds for beta-Pareto and gamma-SD vs epsilon;
* 5 -- the alpha*eta <= e^eps frontier, one series per epsilon;
* 6, 7 -- gamma threshold against alpha / eta, one series per epsilon;
* 8 -- gamma threshold against beta, n = 10 and n = 20.

Three-way series run the partner level from 1 up to its two-way upper bound
at that epsilon, on a grid shared by all series of the figure.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from dpvote import bounds
from dpvote.bounds import BoundId
from dpvote.core import Profile, impartial_culture_votes

DEFAULT_EPSILON_GRID = tuple(float(x) for x in np.linspace(0.01, 3.0, 300))
FIGURE_EPSILONS = (0.1, 0.2, 0.5, 1.0)
LEVEL_POINTS = 300
FIGURES = (2, 3, 4, 5, 6, 7, 8)
CSV_HEADER = ("sweep", "epsilon", "x_name", "x_value", "y_name", "y_value", "series")

ALPHA_ETA_TOL = 1e-9


@dataclass
class CurveRow:
    sweep: str
    epsilon: float
    x_name: str
    x_value: float
    y_name: str
    y_value: float
    series: str
    flag: str = ""  # e.g. "limit_point"; kept out of the CSV columns


@dataclass
class SweepSpec:
    target: str
    m: int = 5
    n: int = 10
    epsilon_grid: Sequence[float] = field(default_factory=lambda: DEFAULT_EPSILON_GRID)
    omega_grid: Sequence[float] = field(default_factory=lambda: tuple(np.linspace(0.0, 1.0, 11)))
    level_grid: Sequence[float] | None = None
    output: str | None = None

    def __post_init__(self):
        for name in ("epsilon_grid", "omega_grid"):
            grid = list(getattr(self, name))
            if not grid:
                raise ValueError(f"{name} is empty")
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ValueError(f"{name} must be strictly increasing")
        if self.level_grid is not None:
            lv = list(self.level_grid)
            if not lv or any(b <= a for a, b in zip(lv, lv[1:])):
                raise ValueError("level_grid must be non-empty and strictly increasing")


def sweep_two_way(spec: SweepSpec) -> Iterator[CurveRow]:
    """Upper and lower two-way bounds over the epsilon grid (target ``pareto`` or ``sd``)."""
    target = spec.target.lower()
    if target in ("pareto", "fig3"):
        name, y, pair = "fig3" if target == "fig3" else "pareto", "beta", (BoundId.ParetoUpper, BoundId.ParetoLower)
    elif target in ("sd", "fig4"):
        name, y, pair = "fig4" if target == "fig4" else "sd", "gamma", (BoundId.SdUpper, BoundId.SdLower)
    else:
        raise ValueError(f"not a two-way sweep target: {spec.target!r}")
    for eps in spec.epsilon_grid:
        for bid, label in zip(pair, ("upper", "lower")):
            yield CurveRow(name, eps, "epsilon", eps, y, bounds.two_way_bound(bid, spec.m, spec.n, eps), label)


def mixture_levels(m: int, epsilon: float, omega: float) -> tuple[float, float]:
    """Closed-form (alpha, eta) of the CWRR/CLRR mixture on profiles with both a
    Condorcet winner and loser."""
    e = math.exp(epsilon)
    cw_den, cl_den = e + m - 1, (m - 1) * e + 1
    p_cw = omega * e / cw_den + (1 - omega) * e / cl_den
    p_cl = omega / cw_den + (1 - omega) / cl_den
    p_mid = omega / cw_den + (1 - omega) * e / cl_den
    return p_cw / p_mid, p_mid / p_cl


def sweep_mixture(m: int, epsilon: float, omega_grid: Iterable[float]) -> Iterator[CurveRow]:
    target = math.exp(epsilon)
    for omega in omega_grid:
        alpha, eta = mixture_levels(m, epsilon, omega)
        if abs(alpha * eta - target) > ALPHA_ETA_TOL * max(1.0, target):
            raise ArithmeticError(f"alpha*eta = {alpha * eta} != e^eps = {target} at omega={omega}")
        yield CurveRow("mixture", epsilon, "alpha", alpha, "eta", eta, f"omega={omega:.17g}")


def partner_cap(combo: BoundId, m: int, n: int, epsilon: float) -> float:
    """Two-way upper bound of the level on the x axis of a three-way curve."""
    if combo in (BoundId.CwParetoProduct, BoundId.ClParetoProduct, BoundId.ParetoSdGamma):
        return bounds.two_way_bound(BoundId.ParetoUpper, m, n, epsilon)
    return math.exp(epsilon)


_X_NAME = {
    BoundId.CwClProduct: ("alpha", "eta"),
    BoundId.CwParetoProduct: ("beta", "alpha"),
    BoundId.ClParetoProduct: ("beta", "eta"),
    BoundId.CwSdGamma: ("alpha", "gamma"),
    BoundId.ClSdGamma: ("eta", "gamma"),
    BoundId.ParetoSdGamma: ("beta", "gamma"),
}


def sweep_three_way(
    combo: "BoundId | str",
    m: int,
    n: int,
    epsilon_grid: Iterable[float],
    level_grid: Sequence[float],
    sweep: str | None = None,
    truncate: bool = True,
    series_suffix: str = "",
) -> Iterator[CurveRow]:
    """Threshold of ``combo`` over (epsilon, partner level).

    With ``truncate`` the partner level stops at its two-way upper bound.
    ParetoSdGamma at ``beta = 1`` emits the limit value flagged ``limit_point``.
    """
    combo = BoundId.parse(combo)
    if combo not in bounds.THREE_WAY:
        raise ValueError(f"{combo.value} is not a three-way bound")
    x_name, y_name = _X_NAME[combo]
    name = sweep or combo.value
    for eps in epsilon_grid:
        cap = partner_cap(combo, m, n, eps)
        for level in level_grid:
            if truncate and level > cap * (1 + 1e-12):
                break
            thr = bounds.three_way_threshold(combo, level, m, n, eps)
            yield CurveRow(
                name, eps, x_name, level, y_name, thr.value,
                f"eps={eps:g}{series_suffix}", "limit_point" if thr.limit_point else "",
            )


def _level_grid(combo: BoundId, m: int, n: int, epsilons: Sequence[float], points: int = LEVEL_POINTS) -> list[float]:
    top = partner_cap(combo, m, n, max(epsilons))
    return [float(x) for x in np.linspace(1.0, top, points)]


def figure_rows(figure: int, m: int = 5, n: int = 10, epsilon_grid: Sequence[float] | None = None) -> list[CurveRow]:
    """Data for one figure at its default parameters (m=5, n=10; n=20 added for 8)."""
    if figure not in FIGURES:
        raise ValueError(f"figure must be one of {FIGURES}, got {figure}")
    if figure in (3, 4):
        grid = epsilon_grid if epsilon_grid is not None else DEFAULT_EPSILON_GRID
        return list(sweep_two_way(SweepSpec(f"fig{figure}", m, n, grid)))
    if figure == 2:
        grid = epsilon_grid if epsilon_grid is not None else DEFAULT_EPSILON_GRID
        rows = []
        for combo in bounds.THREE_WAY:
            x_name, y_name = _X_NAME[combo]
            for eps in grid:
                thr = bounds.three_way_threshold(combo, 1.0, m, n, eps)
                rows.append(CurveRow("fig2", eps, "epsilon", eps, y_name, thr.value,
                                     f"{combo.value} ({x_name}=1)", "limit_point" if thr.limit_point else ""))
        return rows
    epsilons = tuple(epsilon_grid) if epsilon_grid is not None else FIGURE_EPSILONS
    combo = {5: BoundId.CwClProduct, 6: BoundId.CwSdGamma, 7: BoundId.ClSdGamma, 8: BoundId.ParetoSdGamma}[figure]
    levels = _level_grid(combo, m, n, epsilons)
    if figure != 8:
        return list(sweep_three_way(combo, m, n, epsilons, levels, sweep=f"fig{figure}"))
    rows = []
    for nn in (n, 2 * n):
        rows += sweep_three_way(combo, m, nn, epsilons, levels, sweep="fig8", series_suffix=f" n={nn}")
    return rows


def sweep_natural_bound(m: int, epsilon_grid: Iterable[float], n_max: int | None = None) -> Iterator[CurveRow]:
    """Largest ``alpha * beta^(m-2)`` allowed by the three-way bound versus the
    product of the two single-axiom optima, as a function of ``n``.

    The three-way bound is the smaller one exactly when ``n <= m - 1``.
    """
    n_max = n_max or 2 * m
    for eps in epsilon_grid:
        for n in range(1, n_max + 1):
            three_way = bounds.safe_exp(n * eps)
            natural = bounds.safe_exp(eps * (1 + n - n / (m - 1)))
            yield CurveRow("natural", eps, "n", float(n), "alpha_beta", three_way, f"three-way eps={eps:g}")
            yield CurveRow("natural", eps, "n", float(n), "alpha_beta", natural, f"natural eps={eps:g}")


def run_sweep(spec: SweepSpec) -> list[CurveRow]:
    target = spec.target.lower()
    if target.startswith("fig") and target[3:].isdigit():
        fig = int(target[3:])
        grid = None if spec.epsilon_grid is DEFAULT_EPSILON_GRID else spec.epsilon_grid
        return figure_rows(fig, spec.m, spec.n, grid)
    if target in ("pareto", "sd"):
        return list(sweep_two_way(spec))
    if target == "natural":
        return list(sweep_natural_bound(spec.m, spec.epsilon_grid))
    if target == "mixture":
        return [row for eps in spec.epsilon_grid for row in sweep_mixture(spec.m, eps, spec.omega_grid)]
    combo = BoundId.parse(spec.target)
    levels = spec.level_grid or _level_grid(combo, spec.m, spec.n, spec.epsilon_grid)
    return list(sweep_three_way(combo, spec.m, spec.n, spec.epsilon_grid, levels))


# ---------------------------------------------------------------------------
# figure properties


def _series_by_eps(rows: Sequence[CurveRow]) -> dict[str, dict[float, dict[float, float]]]:
    # n-label -> epsilon -> x -> y
    out: dict[str, dict[float, dict[float, float]]] = {}
    for r in rows:
        tag = r.series.split(" n=")[1] if " n=" in r.series else ""
        out.setdefault(tag, {}).setdefault(r.epsilon, {})[r.x_value] = r.y_value
    return out


def epsilon_order_violations(rows: Sequence[CurveRow], tol: float = 0.0) -> list[str]:
    """Series at larger epsilon must sit pointwise at or above smaller-epsilon ones.

    Rows whose x axis is epsilon itself are checked for monotonicity along x
    within each series instead.
    """
    bad = []
    if rows and rows[0].x_name == "epsilon":
        per: dict[str, list[tuple[float, float]]] = {}
        for r in rows:
            per.setdefault(r.series, []).append((r.x_value, r.y_value))
        for label, pts in per.items():
            pts.sort()
            for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
                if y1 < y0 - tol:
                    bad.append(f"{label}: y drops from {y0} at eps={x0} to {y1} at eps={x1}")
        return bad
    for tag, by_eps in _series_by_eps(rows).items():
        eps_sorted = sorted(by_eps)
        for lo, hi in zip(eps_sorted, eps_sorted[1:]):
            for x, y_lo in by_eps[lo].items():
                y_hi = by_eps[hi].get(x)
                if y_hi is not None and y_hi < y_lo - tol:
                    bad.append(f"n={tag or '-'} x={x}: eps={hi} gives {y_hi} < {y_lo} at eps={lo}")
    return bad


def n_order_violations(rows: Sequence[CurveRow], small_n: int, large_n: int, tol: float = 0.0) -> list[str]:
    """The larger-n curve must sit pointwise at or above the smaller-n curve."""
    groups = _series_by_eps(rows)
    lo, hi = groups.get(str(small_n), {}), groups.get(str(large_n), {})
    bad = []
    for eps, pts in lo.items():
        for x, y in pts.items():
            y2 = hi.get(eps, {}).get(x)
            if y2 is not None and y2 < y - tol:
                bad.append(f"eps={eps} x={x}: n={large_n} gives {y2} < {y}")
    return bad


# ---------------------------------------------------------------------------
# output


def format_float(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def write_csv(rows: Iterable[CurveRow], stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r.sweep, format_float(r.epsilon), r.x_name, format_float(r.x_value),
                    r.y_name, format_float(r.y_value), r.series])


def rows_to_csv(rows: Iterable[CurveRow]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# random profiles


def impartial_culture(m: int, n: int, count: int, seed: int) -> Iterator[Profile]:
    """``count`` profiles of ``n`` i.i.d. uniform rankings, reproducible per seed."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if m < 2 or n < 1:
        raise ValueError(f"need m >= 2 and n >= 1, got m={m}, n={n}")
    return _impartial_stream(m, n, count, np.random.default_rng(seed))


def _impartial_stream(m, n, count, rng):
    for _ in range(count):
        yield Profile._trusted(impartial_culture_votes(m, n, rng), m)
