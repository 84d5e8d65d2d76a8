"""Closed-form privacy/axiom tradeoff bounds.

Two-way bounds (one axiom against epsilon-DP), with ``E = e^{n eps}``:

==================  ========================================
ParetoUpper         ``e^{n eps / (m-1)}``
ParetoLower         ``e^{n eps / (2m-2)}``
SdUpper             ``(m-1) E / ((m-1) E + 1)``
SdLower             ``(m-1) e^eps / ((m-1) e^eps + 1)``
CondorcetTight      ``e^eps``
CondorcetLoserTight ``e^eps``
==================  ========================================

Three-way upper bounds (two axioms against epsilon-DP):

===============  ==================================================
CwClProduct      ``alpha * eta <= e^eps``
CwParetoProduct  ``alpha * beta^(m-2) <= E``
ClParetoProduct  ``eta * beta^(m-2) <= E``
CwSdGamma        ``gamma <= (alpha + m - 1 - alpha / E) / (alpha + m - 1)``
ClSdGamma        ``gamma <= (E - eta) / E``
ParetoSdGamma    ``gamma <= (E - E beta^(2-m)) / (E - E beta^(2-m) + beta - 1)``
===============  ==================================================

ParetoSdGamma is 0/0 at ``beta = 1``; its limit ``(m-2) E / ((m-2) E + 1)`` is
used there and flagged.  For comparison the product of the two single-axiom
optima, ``alpha * beta^(m-2) <= e^eps * e^{n eps (m-2)/(m-1)}``, is only
weaker than CwParetoProduct when ``n <= m-1``.

Exponentials that would overflow (exponent above 700) evaluate to ``inf``
and the ``E``-ratio forms are computed without forming ``E``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from dpvote.mechanisms import MechanismId

_EXP_LIMIT = 700.0


class BoundId(str, enum.Enum):
    ParetoUpper = "ParetoUpper"
    ParetoLower = "ParetoLower"
    SdUpper = "SdUpper"
    SdLower = "SdLower"
    CondorcetTight = "CondorcetTight"
    CondorcetLoserTight = "CondorcetLoserTight"
    CwClProduct = "CwClProduct"
    CwParetoProduct = "CwParetoProduct"
    ClParetoProduct = "ClParetoProduct"
    CwSdGamma = "CwSdGamma"
    ClSdGamma = "ClSdGamma"
    ParetoSdGamma = "ParetoSdGamma"

    @classmethod
    def parse(cls, name: "str | BoundId") -> "BoundId":
        if isinstance(name, BoundId):
            return name
        for b in cls:
            if b.value.lower() == name.lower():
                return b
        raise ValueError(f"unknown bound {name!r}")


TWO_WAY = (
    BoundId.ParetoUpper,
    BoundId.ParetoLower,
    BoundId.SdUpper,
    BoundId.SdLower,
    BoundId.CondorcetTight,
    BoundId.CondorcetLoserTight,
)
THREE_WAY = (
    BoundId.CwClProduct,
    BoundId.CwParetoProduct,
    BoundId.ClParetoProduct,
    BoundId.CwSdGamma,
    BoundId.ClSdGamma,
    BoundId.ParetoSdGamma,
)

# which measured levels each three-way combination reads
COMBO_LEVELS = {
    BoundId.CwClProduct: ("alpha", "eta"),
    BoundId.CwParetoProduct: ("alpha", "beta"),
    BoundId.ClParetoProduct: ("eta", "beta"),
    BoundId.CwSdGamma: ("alpha", "gamma"),
    BoundId.ClSdGamma: ("eta", "gamma"),
    BoundId.ParetoSdGamma: ("beta", "gamma"),
}


def safe_exp(x: float) -> float:
    return math.inf if x > _EXP_LIMIT else math.exp(x)


def _rr_share(k: float, log_e: float) -> float:
    """``k E / (k E + 1)`` for ``E = exp(log_e)``, stable for huge ``E``."""
    if k == 0:
        return 0.0
    return 1.0 / (1.0 + math.exp(-log_e) / k)


def _check(m: int, n: int, epsilon: float) -> None:
    if m < 2 or n < 1 or not epsilon > 0:
        raise ValueError(f"need m >= 2, n >= 1, epsilon > 0 (got m={m}, n={n}, epsilon={epsilon})")


def two_way_bound(bound: "BoundId | str", m: int, n: int, epsilon: float) -> float:
    bound = BoundId.parse(bound)
    _check(m, n, epsilon)
    if bound is BoundId.ParetoUpper:
        return safe_exp(n * epsilon / (m - 1))
    if bound is BoundId.ParetoLower:
        return safe_exp(n * epsilon / (2 * m - 2))
    if bound is BoundId.SdUpper:
        return _rr_share(m - 1, n * epsilon)
    if bound is BoundId.SdLower:
        return _rr_share(m - 1, epsilon)
    if bound in (BoundId.CondorcetTight, BoundId.CondorcetLoserTight):
        return safe_exp(epsilon)
    raise ValueError(f"{bound.value} is not a two-way bound")


# ---------------------------------------------------------------------------
# three-way thresholds


@dataclass(frozen=True)
class Threshold:
    value: float
    limit_point: bool = False


def cw_sd_gamma_threshold(alpha: float, m: int, n: int, epsilon: float) -> float:
    return (alpha + m - 1 - alpha * math.exp(-n * epsilon)) / (alpha + m - 1)


def cl_sd_gamma_threshold(eta: float, m: int, n: int, epsilon: float) -> float:
    # (E - eta) / E
    return 1.0 - eta * math.exp(-n * epsilon)


def pareto_sd_gamma_threshold(beta: float, m: int, n: int, epsilon: float) -> Threshold:
    if beta < 1:
        raise ValueError("beta-Pareto levels below 1 are outside the bound's range")
    if beta == 1:
        # limit beta -> 1+: numerator ~ E (m-2)(beta-1), denominator ~ (E (m-2) + 1)(beta-1)
        return Threshold(_rr_share(m - 2, n * epsilon), limit_point=True)
    gap = 1.0 - beta ** (2 - m)
    # divide through by E
    return Threshold(gap / (gap + (beta - 1) * math.exp(-n * epsilon)))


def product_log_bound(combo: BoundId, m: int, n: int, epsilon: float) -> float:
    """Log of the right-hand side for the product-form combinations."""
    return epsilon if combo is BoundId.CwClProduct else n * epsilon


@dataclass
class ThreeWayResult:
    combo: BoundId
    applicable: bool
    holds: bool | None = None
    value: float | None = None
    threshold: float | None = None
    slack: float | None = None
    limit_point: bool = False
    reason: str = ""


def three_way_check(combo: "BoundId | str", levels, m: int, n: int, epsilon: float, tol: float = 1e-9) -> ThreeWayResult:
    """Test measured levels against a three-way upper bound.

    ``levels`` is anything with ``alpha``/``beta``/``gamma``/``eta`` attributes
    (e.g. :class:`dpvote.axioms.AchievedLevels`) or a mapping.  A missing level
    gives an explicit not-applicable result.
    """
    combo = BoundId.parse(combo)
    if combo not in THREE_WAY:
        raise ValueError(f"{combo.value} is not a three-way bound")
    _check(m, n, epsilon)
    get = levels.get if isinstance(levels, dict) else (lambda k: getattr(levels, k, None))
    need = COMBO_LEVELS[combo]
    missing = [k for k in need if get(k) is None]
    if missing:
        return ThreeWayResult(combo, applicable=False, reason=f"missing level(s): {', '.join(missing)}")

    if combo in (BoundId.CwClProduct, BoundId.CwParetoProduct, BoundId.ClParetoProduct):
        first = get(need[0])
        if combo is BoundId.CwClProduct:
            log_value = math.log(first) + math.log(get("eta"))
        else:
            log_value = math.log(first) + (m - 2) * math.log(get("beta"))
        log_bound = product_log_bound(combo, m, n, epsilon)
        slack = log_bound - log_value  # compared in log space
        value, threshold = safe_exp(log_value), safe_exp(log_bound)
        return ThreeWayResult(combo, True, slack >= -tol, value, threshold, slack)

    gamma = get("gamma")
    limit = False
    if combo is BoundId.CwSdGamma:
        thr = cw_sd_gamma_threshold(get("alpha"), m, n, epsilon)
    elif combo is BoundId.ClSdGamma:
        thr = cl_sd_gamma_threshold(get("eta"), m, n, epsilon)
    else:
        t = pareto_sd_gamma_threshold(get("beta"), m, n, epsilon)
        thr, limit = t.value, t.limit_point
    slack = thr - gamma
    return ThreeWayResult(combo, True, slack >= -tol, gamma, thr, slack, limit_point=limit)


def three_way_threshold(combo: "BoundId | str", partner: float, m: int, n: int, epsilon: float) -> Threshold:
    """The bound as a curve in the partner level.

    For the product forms this is the largest admissible second factor
    (``eta`` given ``alpha``, ``alpha`` given ``beta``, ...); for the gamma
    forms it is the largest admissible ``gamma``.
    """
    combo = BoundId.parse(combo)
    _check(m, n, epsilon)
    if combo is BoundId.CwClProduct:
        return Threshold(safe_exp(epsilon) / partner)
    if combo in (BoundId.CwParetoProduct, BoundId.ClParetoProduct):
        # partner is beta
        return Threshold(safe_exp(n * epsilon - (m - 2) * math.log(partner)))
    if combo is BoundId.CwSdGamma:
        return Threshold(cw_sd_gamma_threshold(partner, m, n, epsilon))
    if combo is BoundId.ClSdGamma:
        return Threshold(cl_sd_gamma_threshold(partner, m, n, epsilon))
    if combo is BoundId.ParetoSdGamma:
        return pareto_sd_gamma_threshold(partner, m, n, epsilon)
    raise ValueError(f"{combo.value} is not a three-way bound")


# ---------------------------------------------------------------------------
# per-mechanism lower bounds


@dataclass(frozen=True)
class LowerBoundCell:
    mechanism: MechanismId
    axiom: str
    value: float
    epsilon_suspect: bool = False


LOWER_BOUND_AXIOMS = ("beta", "gamma", "alpha", "eta")


def mechanism_lower_bound(mech: "MechanismId | str", axiom: str, m: int, n: int, epsilon: float) -> LowerBoundCell:
    """Closed-form level credited to each single-axiom mechanism.

    The BordaEXP gamma/alpha/eta formulas contain n but no epsilon; they are
    evaluated unchanged and marked ``epsilon_suspect``.
    """
    mech = MechanismId.parse(mech)
    _check(m, n, epsilon)
    if axiom not in LOWER_BOUND_AXIOMS:
        raise ValueError(f"unknown axiom {axiom!r}")
    e = math.exp(epsilon)
    fl, cl = n // 2, -(-n // 2)
    if mech is MechanismId.BordaEXP:
        if axiom == "beta":
            return LowerBoundCell(mech, axiom, safe_exp(n * epsilon / (2 * m - 2)))
        if axiom == "gamma":
            a, b = math.exp(n / 2), math.exp(n * (m - 2) / (4 * m - 4))
            return LowerBoundCell(mech, axiom, (a + (m - 2) * b) / (a + (m - 1) * b), True)
        if axiom == "alpha":
            return LowerBoundCell(mech, axiom, math.exp((fl + 1) * m / (2 * m - 2) - n / 2), True)
        return LowerBoundCell(mech, axiom, math.exp(n / (2 * m - 2) - (cl - 1) * m / (2 * m - 2)), True)
    if mech is MechanismId.RDAnti:
        if axiom == "beta":
            return LowerBoundCell(mech, axiom, 1.0)
        if axiom == "gamma":
            return LowerBoundCell(mech, axiom, (m - 1) * e / ((m - 1) * e + 1))
        return LowerBoundCell(mech, axiom, ((fl - 1) * e + cl + 1) / (n * e))
    if mech is MechanismId.CWRR:
        vals = {"beta": 1.0, "gamma": (m - 1) / m, "alpha": e, "eta": 1.0}
        return LowerBoundCell(mech, axiom, vals[axiom])
    if mech is MechanismId.CLRR:
        vals = {"beta": 1.0, "gamma": ((m - 2) * e + 1) / ((m - 1) * e + 1), "alpha": 1.0, "eta": e}
        return LowerBoundCell(mech, axiom, vals[axiom])
    raise ValueError(f"no per-mechanism lower bounds are listed for {mech.value}")
