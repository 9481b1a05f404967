"""Exact pivot probabilities.

Outcome pivots: the change in Pr(party A wins) from one added vote.  A
focal voter faces the aggregate vote totals A ~ Poisson(n_T p),
B ~ Poisson(n_T q); an extra A-vote matters on {A = B} (breaks the tie,
half the coin-flip) and on {A = B - 1} (forces the tie).  Both reduce to
the Skellam pmf of A - B.

Prize pivots: the change in group k's expected prize from one added
vote by a group member, per allocation rule.  The winner-take-all sum
is evaluated by the active kernel backend with a reported truncation
bound; threshold, specific, and proportionate rules are closed-form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import backends
from .model import Electorate, Proportionate, Scenario, Specific, Threshold, VoteProfile, WTA
from .special import poisson_pmf, skellam_pmf

CONVENTIONS = ("strict", "lenient")


def _check_convention(convention: str) -> bool:
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}, got {convention!r}")
    return convention == "strict"


def _rates(profile: VoteProfile, electorate: Electorate, party: str) -> np.ndarray:
    if party == "A":
        return profile.rates_a(electorate)
    if party == "B":
        return profile.rates_b(electorate)
    raise ValueError(f"party must be 'A' or 'B', got {party!r}")


def outcome_pivot_a(profile: VoteProfile, electorate: Electorate) -> float:
    """Probability one extra A-vote changes the winner, in [0, 1]."""
    la = electorate.n_total * profile.aggregate_p(electorate)
    lb = electorate.n_total * profile.aggregate_q(electorate)
    return 0.5 * skellam_pmf(la, lb, 0) + 0.5 * skellam_pmf(la, lb, -1)


def outcome_pivot_b(profile: VoteProfile, electorate: Electorate) -> float:
    """Change in Pr(A wins) from one extra B-vote; always in [-1, 0]."""
    la = electorate.n_total * profile.aggregate_p(electorate)
    lb = electorate.n_total * profile.aggregate_q(electorate)
    return -(0.5 * skellam_pmf(la, lb, 0) + 0.5 * skellam_pmf(la, lb, 1))


def truncation_cutoff(rates) -> int:
    """Summation cutoff a*; Poisson mass above it is below 1e-12."""
    lmax = float(np.max(rates)) if len(rates) else 0.0
    return int(math.ceil(lmax + 12.0 * math.sqrt(lmax) + 20.0))


def wta_pivot_units(rates, convention: str = "strict"):
    """Unit-prize WTA pivots for every group at Poisson rates `rates`.

    Returns (units, tail_bound).  Under `lenient` the all-zero vote
    field counts as a win for everyone, so a first vote gains nothing;
    under `strict` a winner needs at least one vote and the first vote
    captures the prize whenever every rival is at zero.
    """
    strict = _check_convention(convention)
    rates = np.asarray(rates, dtype=np.float64)
    if rates.shape[0] < 2:
        raise ValueError("winner-take-all needs at least two competing groups")
    if np.any(rates < 0) or not np.all(np.isfinite(rates)):
        raise ValueError("vote rates must be finite and nonnegative")
    units, tail = backends.get().wta_pivot_unit(rates, strict)
    return np.clip(units, 0.0, 1.0), float(tail)


def prize_pivot_wta(k: int, profile: VoteProfile, electorate: Electorate, zeta: float,
                    convention: str = "strict", party: str = "A") -> float:
    units, _ = wta_pivot_units(_rates(profile, electorate, party), convention)
    return zeta * float(units[k])


def prize_pivot_wta_k2(k: int, profile: VoteProfile, electorate: Electorate, zeta: float,
                       party: str = "A") -> float:
    """Two-group WTA pivot in closed form (lenient convention).

    With one rival j, the extra vote matters exactly when the rival
    leads by one, so the pivot is zeta * Pr(A_j - A_k = 1), a Skellam
    point mass.
    """
    rates = _rates(profile, electorate, party)
    if rates.shape[0] != 2:
        raise ValueError("two-group form requires exactly two groups")
    j = 1 - int(k)
    return zeta * skellam_pmf(float(rates[j]), float(rates[k]), 1)


def prize_pivot_threshold(k: int, profile: VoteProfile, electorate: Electorate, t: int,
                          zeta: float, party: str = "A") -> float:
    """One vote matters exactly when the group sits one short of t."""
    if t < 1:
        raise ValueError(f"threshold must be >= 1, got {t}")
    lam = float(_rates(profile, electorate, party)[k])
    return zeta * poisson_pmf(lam, t - 1)


def prize_pivot_specific(k: int, rule: Specific) -> float:
    # allocation is fixed by membership; votes cannot move it
    return 0.0


def prize_pivot_proportionate(rho: float) -> float:
    return float(rho)


@dataclass(frozen=True)
class TruncationInfo:
    a_star: int
    tail_bound: float


@dataclass(frozen=True)
class PivotReport:
    """Outcome pivots plus per-group prize pivots for both parties."""

    op_a: float
    op_b: float
    pp_a: tuple[float, ...]
    pp_b: tuple[float, ...]
    method: str
    convention: Optional[str] = None
    truncation_a: Optional[TruncationInfo] = None
    truncation_b: Optional[TruncationInfo] = None

    def as_json_dict(self) -> dict:
        doc = {
            "op_A": self.op_a,
            "op_B": self.op_b,
            "pp_A": list(self.pp_a),
            "pp_B": list(self.pp_b),
            "method": self.method,
        }
        if self.convention is not None:
            doc["convention"] = self.convention
        for name, info in (("truncation_A", self.truncation_a),
                           ("truncation_B", self.truncation_b)):
            if info is not None:
                doc[name] = {"a_star": info.a_star, "tail_bound": info.tail_bound}
        return doc


def _prize_pivots_for_party(scenario: Scenario, party: str, convention: str):
    rule = scenario.rule
    zeta = scenario.prizes.zeta_a if party == "A" else scenario.prizes.zeta_b
    k_groups = scenario.electorate.k
    if isinstance(rule, WTA):
        rates = _rates(scenario.profile, scenario.electorate, party)
        units, tail = wta_pivot_units(rates, convention)
        info = TruncationInfo(truncation_cutoff(rates), tail)
        return tuple(zeta * float(u) for u in units), info
    if isinstance(rule, Threshold):
        pp = tuple(
            prize_pivot_threshold(k, scenario.profile, scenario.electorate, rule.t, zeta, party)
            for k in range(k_groups)
        )
        return pp, None
    if isinstance(rule, Specific):
        return tuple(0.0 for _ in range(k_groups)), None
    if isinstance(rule, Proportionate):
        return tuple(prize_pivot_proportionate(rule.rho) for _ in range(k_groups)), None
    raise TypeError(f"unknown prize rule {rule!r}")


def pivot_report(scenario: Scenario, convention: str = "strict") -> PivotReport:
    """Exact pivots for the scenario as stated, both parties."""
    _check_convention(convention)
    pp_a, trunc_a = _prize_pivots_for_party(scenario, "A", convention)
    pp_b, trunc_b = _prize_pivots_for_party(scenario, "B", convention)
    return PivotReport(
        op_a=outcome_pivot_a(scenario.profile, scenario.electorate),
        op_b=outcome_pivot_b(scenario.profile, scenario.electorate),
        pp_a=pp_a,
        pp_b=pp_b,
        method="exact",
        convention=convention,
        truncation_a=trunc_a,
        truncation_b=trunc_b,
    )
