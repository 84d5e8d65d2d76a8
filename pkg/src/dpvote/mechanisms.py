"""The five private voting rules, as exact lotteries plus samplers.

Every rule is exposed as a function ``profile -> lottery`` so verification can
work on exact output distributions.  Sampling is layered on top and follows
each rule's two-stage description where it has one (RD-Anti picks a ballot
first, the mixture flips a coin first); tests check the two paths agree.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from dpvote.core import (
    Profile,
    borda_scores,
    condorcet_loser,
    condorcet_winner,
    majority_margins,
    uniform_lottery,
)

LotteryFn = Callable[[Profile], np.ndarray]

DEFAULT_SEED = 20240229


class MechanismId(str, enum.Enum):
    BordaEXP = "BordaEXP"
    RDAnti = "RDAnti"
    CWRR = "CWRR"
    CLRR = "CLRR"
    Mixture = "Mixture"

    @classmethod
    def parse(cls, name: "str | MechanismId") -> "MechanismId":
        """Case-insensitive lookup; ``rd-anti`` and ``rd_anti`` also work."""
        if isinstance(name, MechanismId):
            return name
        key = name.replace("-", "").replace("_", "").lower()
        for mid in cls:
            if mid.value.lower() == key:
                return mid
        raise ValueError(f"unknown mechanism {name!r}; choose from {', '.join(m.value for m in cls)}")


@dataclass(frozen=True)
class MechanismConfig:
    epsilon: float
    omega: float = 0.5
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise ValueError(f"epsilon must be a positive finite real, got {self.epsilon}")
        if not 0.0 <= self.omega <= 1.0:
            raise ValueError(f"omega must lie in [0, 1], got {self.omega}")


def _check_eps(epsilon: float) -> None:
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")


def borda_exp_lottery(p: Profile, epsilon: float) -> np.ndarray:
    """Exponential mechanism with Borda utility, ``p(a) ~ exp(Borda(a) eps / (2m-2))``."""
    _check_eps(epsilon)
    logits = borda_scores(p) * (epsilon / (2 * p.m - 2))
    w = np.exp(logits - logits.max())
    return w / w.sum()


def _anti_ballot_lottery(m: int, last: int, epsilon: float) -> np.ndarray:
    e = math.exp(epsilon)
    z = (m - 1) * e + 1
    out = np.full(m, e / z)
    out[last] = 1 / z
    return out


def rd_anti_lottery(p: Profile, epsilon: float) -> np.ndarray:
    """Pick a ballot uniformly, then randomised response against its last choice.

    Returned exactly, i.e. averaged over the ballot choice.
    """
    _check_eps(epsilon)
    e = math.exp(epsilon)
    z = (p.m - 1) * e + 1
    last = np.bincount([v[-1] for v in p.votes], minlength=p.m)
    # each ballot gives e/z to non-last alternatives and 1/z to its last one
    return ((p.n - last) * e + last) / (p.n * z)


def cwrr_lottery(p: Profile, epsilon: float) -> np.ndarray:
    _check_eps(epsilon)
    cw = condorcet_winner(majority_margins(p))
    if cw is None:
        return uniform_lottery(p.m)
    e = math.exp(epsilon)
    out = np.full(p.m, 1 / (e + p.m - 1))
    out[cw] = e / (e + p.m - 1)
    return out


def clrr_lottery(p: Profile, epsilon: float) -> np.ndarray:
    _check_eps(epsilon)
    cl = condorcet_loser(majority_margins(p))
    if cl is None:
        return uniform_lottery(p.m)
    return _anti_ballot_lottery(p.m, cl, epsilon)


def mixture_lottery(p: Profile, epsilon: float, omega: float) -> np.ndarray:
    """``omega * CWRR + (1 - omega) * CLRR``."""
    if not 0.0 <= omega <= 1.0:
        raise ValueError(f"omega must lie in [0, 1], got {omega}")
    return omega * cwrr_lottery(p, epsilon) + (1 - omega) * clrr_lottery(p, epsilon)


def lottery(mech: "MechanismId | str", p: Profile, cfg: MechanismConfig) -> np.ndarray:
    mech = MechanismId.parse(mech)
    if mech is MechanismId.BordaEXP:
        return borda_exp_lottery(p, cfg.epsilon)
    if mech is MechanismId.RDAnti:
        return rd_anti_lottery(p, cfg.epsilon)
    if mech is MechanismId.CWRR:
        return cwrr_lottery(p, cfg.epsilon)
    if mech is MechanismId.CLRR:
        return clrr_lottery(p, cfg.epsilon)
    return mixture_lottery(p, cfg.epsilon, cfg.omega)


def lottery_fn(mech: "MechanismId | str | LotteryFn", cfg: MechanismConfig | None = None) -> LotteryFn:
    """Resolve a mechanism name (plus config) or a plain callable to ``profile -> lottery``."""
    if callable(mech) and not isinstance(mech, (str, MechanismId)):
        return mech
    if cfg is None:
        raise ValueError("a MechanismConfig is required for named mechanisms")
    mid = MechanismId.parse(mech)
    return lambda p: lottery(mid, p, cfg)


def uniform_rule(p: Profile) -> np.ndarray:
    """Constant uniform baseline (0-DP)."""
    return uniform_lottery(p.m)


# ---------------------------------------------------------------------------
# sampling


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def sample(lot: np.ndarray, rng: np.random.Generator) -> int:
    """Draw one alternative by inverse-CDF on a single uniform."""
    cdf = np.cumsum(lot)
    u = rng.random() * cdf[-1]
    return int(min(np.searchsorted(cdf, u, side="right"), len(lot) - 1))


def sample_many(lot: np.ndarray, size: int, rng: np.random.Generator) -> np.ndarray:
    cdf = np.cumsum(lot)
    u = rng.random(size) * cdf[-1]
    return np.minimum(np.searchsorted(cdf, u, side="right"), len(lot) - 1)


def sample_winner(mech: "MechanismId | str", p: Profile, cfg: MechanismConfig, rng: np.random.Generator) -> int:
    """Run the rule as a randomised procedure and return the winner."""
    mech = MechanismId.parse(mech)
    if mech is MechanismId.RDAnti:
        j = int(rng.integers(p.n))
        return sample(_anti_ballot_lottery(p.m, p.votes[j][-1], cfg.epsilon), rng)
    if mech is MechanismId.Mixture:
        # x ~ Bernoulli(omega); x = 1 runs CWRR, x = 0 runs CLRR
        x = rng.random() < cfg.omega
        return sample(cwrr_lottery(p, cfg.epsilon) if x else clrr_lottery(p, cfg.epsilon), rng)
    return sample(lottery(mech, p, cfg), rng)
