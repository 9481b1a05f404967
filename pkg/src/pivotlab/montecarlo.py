"""Monte Carlo estimators for pivot probabilities and whole elections.

Every estimator draws Poisson vote counts through the active backend,
whose per-sample substreams are derived from (seed, sample index); the
returned statistics are built from integer counts reduced in a fixed
order, so results are bit-for-bit reproducible at any thread count.

Prize pivots are estimated with common random numbers: each sample
evaluates the group's prize with and without one extra vote on the same
draw, so the estimator averages a {0, zeta} difference instead of
subtracting two large independent means.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import backends
from .model import Electorate, PrizeSpec, Proportionate, Specific, Threshold, VoteProfile, WTA
from .pivots import _check_convention

__all__ = [
    "McEstimate",
    "ElectionSummary",
    "mc_outcome_pivot",
    "mc_prize_pivot",
    "mc_election",
]


@dataclass(frozen=True)
class McEstimate:
    """A simulation estimate: mean, standard error, and its replication key."""

    mean: float
    std_error: float
    samples: int
    seed: int


@dataclass(frozen=True, eq=False)
class ElectionSummary:
    """Empirical election statistics from repeated full simulations.

    pr_a_wins counts ties as half a win (the coin-flip resolution);
    prize_a / prize_b hold each group's expected prize from the
    respective party; the histograms count party vote totals, with the
    final bin absorbing everything at or above the cap.
    """

    pr_a_wins: McEstimate
    prize_a: Tuple[float, ...]
    prize_b: Tuple[float, ...]
    hist_a: np.ndarray
    hist_b: np.ndarray
    hist_cap: int


def _check_run(samples: int, seed: int) -> None:
    if not isinstance(samples, int) or samples < 1:
        raise ValueError(f"samples must be a positive integer, got {samples!r}")
    if not isinstance(seed, int) or not (0 <= seed < 2 ** 64):
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed!r}")


def _bernoulli_estimate(count: int, samples: int, scale: float, seed: int) -> McEstimate:
    # scale * indicator: variance is scale^2 p(1-p), computed from the
    # exact hit count so the estimate is reproduction-stable
    phat = count / samples
    se = scale * math.sqrt(max(phat * (1.0 - phat), 0.0) / samples)
    return McEstimate(mean=scale * phat, std_error=se, samples=samples, seed=seed)


def mc_outcome_pivot(profile: VoteProfile, electorate: Electorate,
                     samples: int, seed: int) -> McEstimate:
    """Simulated outcome pivot for party A.

    Draws the two party totals and averages 1/2*1{A=B} + 1/2*1{A=B-1}.
    A member's view of the rest of the population matches the outside
    view, so the focal voter is simply excluded from the draw.
    """
    _check_run(samples, seed)
    lam_a = float(profile.rates_a(electorate).sum())
    lam_b = float(profile.rates_b(electorate).sum())
    n_eq, n_am1 = backends.get().mc_outcome_counts(lam_a, lam_b, samples, seed)
    # the two events are disjoint, so the average is 0.5 * a Bernoulli
    return _bernoulli_estimate(n_eq + n_am1, samples, 0.5, seed)


def mc_prize_pivot(k: int, profile: VoteProfile, electorate: Electorate, rule,
                   zeta: float, convention: str, samples: int, seed: int,
                   party: str = "A") -> McEstimate:
    """Simulated prize pivot for group k under the given allocation rule.

    Per sample, the group's prize is evaluated with A_k and with A_k + 1
    on the same draw (common random numbers) and the differences are
    averaged.  Tied groups each receive the full prize.  Under the
    strict convention a winner must deliver at least one vote.
    """
    _check_convention(convention)
    _check_run(samples, seed)
    rates = profile.rates_a(electorate) if party == "A" else profile.rates_b(electorate)
    if not 0 <= k < rates.shape[0]:
        raise ValueError(f"group index {k} out of range for {rates.shape[0]} groups")
    impl = backends.get()
    if isinstance(rule, WTA):
        count = impl.mc_wta_pivot_count(rates, k, convention == "strict", samples, seed)
        return _bernoulli_estimate(count, samples, zeta, seed)
    if isinstance(rule, Threshold):
        count = impl.mc_threshold_pivot_count(float(rates[k]), rule.t, samples, seed)
        return _bernoulli_estimate(count, samples, zeta, seed)
    if isinstance(rule, Specific):
        # membership does not move with the vote count: zero, every sample
        return McEstimate(mean=0.0, std_error=0.0, samples=samples, seed=seed)
    if isinstance(rule, Proportionate):
        # one extra vote is worth exactly rho, every sample
        return McEstimate(mean=rule.rho, std_error=0.0, samples=samples, seed=seed)
    raise TypeError(f"unsupported allocation rule: {type(rule).__name__}")


_RULE_CODES = {WTA: 0, Threshold: 1, Specific: 2, Proportionate: 3}


def _default_hist_cap(profile: VoteProfile, electorate: Electorate) -> int:
    lam = max(float(profile.rates_a(electorate).sum()),
              float(profile.rates_b(electorate).sum()))
    return int(math.ceil(lam + 12.0 * math.sqrt(lam) + 20.0))


def mc_election(profile: VoteProfile, electorate: Electorate, rule, prizes: PrizeSpec,
                samples: int, seed: int, hist_cap: Optional[int] = None) -> ElectionSummary:
    """Simulate whole elections: win odds, prize allocation, vote histograms.

    Pr(A wins) scores an exact tie as half a win.  Prize expectations
    follow the rule's own semantics: winner-take-all and threshold pay
    zeta per qualifying sample (ties pay every tied group in full), the
    specific rule pays zeta to members regardless of votes, and the
    proportionate rule pays rho per vote.
    """
    _check_run(samples, seed)
    code = _RULE_CODES[type(rule)]
    t = rule.t if isinstance(rule, Threshold) else 0
    nk = electorate.k
    members = np.zeros(nk, dtype=np.int64)
    if isinstance(rule, Specific):
        for j in rule.members:
            members[j] = 1
    if hist_cap is None:
        hist_cap = _default_hist_cap(profile, electorate)
    wins_a, ties, prize_a, prize_b, hist_a, hist_b = backends.get().mc_election_stats(
        profile.rates_a(electorate), profile.rates_b(electorate),
        code, t, members, samples, seed, hist_cap)

    # W = 1{win} + 0.5 * 1{tie}; the variance comes from the exact counts
    mean = (wins_a + 0.5 * ties) / samples
    second_moment = (wins_a + 0.25 * ties) / samples
    var = max(second_moment - mean * mean, 0.0)
    pr = McEstimate(mean=mean, std_error=math.sqrt(var / samples),
                    samples=samples, seed=seed)

    scale_a = rule.rho if isinstance(rule, Proportionate) else prizes.zeta_a
    scale_b = rule.rho if isinstance(rule, Proportionate) else prizes.zeta_b
    return ElectionSummary(
        pr_a_wins=pr,
        prize_a=tuple(scale_a * int(c) / samples for c in prize_a),
        prize_b=tuple(scale_b * int(c) / samples for c in prize_b),
        hist_a=hist_a,
        hist_b=hist_b,
        hist_cap=hist_cap,
    )
