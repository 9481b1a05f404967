"""Voter calculus, best responses, and the equilibrium family solvers.

A member of group k with policy draw eps compares three options: voting
for A changes utility by (gamma + eps) * OP_A + PP_A(k) - c, voting for
B by (gamma + eps) * OP_B + PP_B(k) - c (OP_B is negative), and
abstaining changes nothing.  Solving each indifference for eps gives the
thresholds tau_A, tau_B, tau_AB; composing them with the noise cdf G
yields the best-response vote probabilities, whose damped fixed point is
a Nash equilibrium.

The family solvers reduce the fixed point to scalar root finding in the
regimes where one force dominates: symmetric competition (policy and
prize both active), a dominant party (outcome pivot numerically zero,
prize competition only), and polarized groups (two disjoint prize
competitions).  Family solvers evaluate the winner-take-all prize pivot
exactly while the per-group rate stays below RATE_SWITCH and use the
asymptotic form above it; the choice is recorded on the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .asymptotic import pp_approx
from .model import (
    DegenerateAtZero,
    Electorate,
    PreferenceModel,
    PrizeSpec,
    Scenario,
    VoteProfile,
    WTA,
)
from .pivots import PivotReport, pivot_report, wta_pivot_units
from .special import skellam_pmf

__all__ = [
    "OP_EPS",
    "RATE_SWITCH",
    "ThresholdSet",
    "EquilibriumResult",
    "PrizeOnlyVerdict",
    "thresholds",
    "thresholds_from_report",
    "best_response",
    "solve_fixed_point",
    "solve_symmetric_competitive",
    "solve_dominant_party",
    "solve_polarized",
    "verify_prize_only",
]

# an outcome pivot below this is treated as exactly zero: the policy term
# cannot move any finite evaluation across the indifference point
OP_EPS = 1e-300

# per-group Poisson rate above which the family solvers switch from the
# exact truncated sum to the asymptotic prize pivot
RATE_SWITCH = 1e4

TAG_CONVERGED = "converged"
TAG_OSCILLATING = "oscillating"
TAG_BOUNDARY = "boundary"


@dataclass(frozen=True)
class ThresholdSet:
    """Per-group indifference thresholds in evaluation units.

    tau_a[k]: vote A beats abstaining for eps above it; tau_b[k]: vote B
    beats abstaining for eps below it; tau_ab[k]: A beats B above it.
    Entries are +-inf sentinels when the corresponding pivot denominator
    vanishes to working precision; the sign then encodes the surviving
    prize-vs-cost comparison.
    """

    tau_a: Tuple[float, ...]
    tau_b: Tuple[float, ...]
    tau_ab: Tuple[float, ...]


@dataclass(frozen=True)
class EquilibriumResult:
    """A solved (or rejected) equilibrium candidate.

    tag is "converged" for an interior solution meeting the tolerance,
    "boundary" when a probability was clamped (full turnout or the p=1/2
    corner), and "oscillating" when damped iteration failed to contract.
    residual is the solver's defining-equation error at the returned
    profile; flags carry non-fatal diagnoses such as a violated
    dominance assumption.
    """

    profile: VoteProfile
    thresholds: ThresholdSet
    pivots: PivotReport
    votes_a: float
    votes_b: float
    turnout: float
    iterations: int
    residual: float
    tag: str
    pivot_method: str
    flags: Tuple[str, ...] = ()

    def as_json_dict(self) -> dict:
        return {
            "p": list(self.profile.p),
            "q": list(self.profile.q),
            "thresholds": {
                "tau_A": list(self.thresholds.tau_a),
                "tau_B": list(self.thresholds.tau_b),
                "tau_AB": list(self.thresholds.tau_ab),
            },
            "pivots": self.pivots.as_json_dict(),
            "votes_A": self.votes_a,
            "votes_B": self.votes_b,
            "turnout": self.turnout,
            "iterations": self.iterations,
            "residual": self.residual,
            "tag": self.tag,
            "pivot_method": self.pivot_method,
            "flags": list(self.flags),
        }


# --- voter calculus ----------------------------------------------------------


def _tau_vote_a(op_a: float, pp: float, c: float, gamma: float) -> float:
    if op_a < OP_EPS:
        # policy term inert; the vote is decided by prize vs cost alone
        return -math.inf if pp >= c else math.inf
    return (c - pp) / op_a - gamma


def _tau_vote_b(op_b: float, pp: float, c: float, gamma: float) -> float:
    # OP_B <= 0: voting B pays for evaluations below the threshold
    if -op_b < OP_EPS:
        return math.inf if pp >= c else -math.inf
    return (c - pp) / op_b - gamma


def _tau_a_vs_b(op_a: float, op_b: float, pp_a: float, pp_b: float, gamma: float) -> float:
    spread = op_a - op_b
    if spread < OP_EPS:
        if pp_a > pp_b:
            return -math.inf
        if pp_b > pp_a:
            return math.inf
        return -gamma
    return (pp_b - pp_a) / spread - gamma


def thresholds_from_report(report: PivotReport, gamma: float, c: float) -> ThresholdSet:
    """Indifference thresholds from an already-computed pivot report."""
    tau_a = tuple(_tau_vote_a(report.op_a, pp, c, gamma) for pp in report.pp_a)
    tau_b = tuple(_tau_vote_b(report.op_b, pp, c, gamma) for pp in report.pp_b)
    tau_ab = tuple(
        _tau_a_vs_b(report.op_a, report.op_b, pa, pb, gamma)
        for pa, pb in zip(report.pp_a, report.pp_b)
    )
    return ThresholdSet(tau_a=tau_a, tau_b=tau_b, tau_ab=tau_ab)


def thresholds(profile: VoteProfile, scenario: Scenario, c: float,
               convention: str = "strict") -> ThresholdSet:
    """Per-group thresholds at the given profile, exact pivots throughout."""
    report = pivot_report(replace(scenario, profile=profile), convention=convention)
    return thresholds_from_report(report, scenario.prefs.gamma, c)


def best_response(profile: VoteProfile, scenario: Scenario, c: float,
                  convention: str = "strict") -> VoteProfile:
    """One application of the best-response mapping.

    A member votes A when eps clears both tau_A (A beats abstaining) and
    tau_AB (A beats B), votes B when eps falls below both tau_B and
    tau_AB, and abstains in between; integrating over G gives the new
    vote probabilities.
    """
    ts = thresholds(profile, scenario, c, convention=convention)
    g = scenario.prefs.g
    p = [1.0 - g.cdf(max(ta, tab)) for ta, tab in zip(ts.tau_a, ts.tau_ab)]
    q = [g.cdf(min(tb, tab)) for tb, tab in zip(ts.tau_b, ts.tau_ab)]
    return VoteProfile(p, q)


# --- damped fixed point --------------------------------------------------------


def solve_fixed_point(scenario: Scenario, c: float,
                      initial: Optional[VoteProfile] = None,
                      damping: float = 0.3, tol: float = 1e-10,
                      max_iter: int = 10_000,
                      convention: str = "strict") -> EquilibriumResult:
    """Damped best-response iteration x <- (1-omega) x + omega BR(x).

    Stops when the infinity norm of the damped update drops below tol
    (tag "converged"); runs that fail to contract, detected by an update
    norm no smaller than it was 500 iterations earlier or by exhausting
    max_iter, are tagged "oscillating" and return the last iterate.
    With multiple equilibria, the initial profile selects the basin.
    """
    if not 0.0 < damping <= 1.0:
        raise ValueError(f"damping must lie in (0, 1], got {damping}")
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    k = scenario.electorate.k
    if initial is None:
        initial = VoteProfile([0.25] * k, [0.25] * k)
    p = np.asarray(initial.p, dtype=float).copy()
    q = np.asarray(initial.q, dtype=float).copy()

    norms: list[float] = []
    tag = TAG_OSCILLATING
    update = math.inf
    iterations = 0
    for iterations in range(1, max_iter + 1):
        cur = VoteProfile(p.tolist(), q.tolist())
        br = best_response(cur, scenario, c, convention=convention)
        dp = damping * (np.asarray(br.p) - p)
        dq = damping * (np.asarray(br.q) - q)
        p += dp
        q += dq
        update = max(float(np.max(np.abs(dp))), float(np.max(np.abs(dq))))
        norms.append(update)
        if update < tol:
            tag = TAG_CONVERGED
            break
        if iterations > 500 and norms[-1] >= norms[-501]:
            break

    profile = VoteProfile(p.tolist(), q.tolist())
    report = pivot_report(replace(scenario, profile=profile), convention=convention)
    ts = thresholds_from_report(report, scenario.prefs.gamma, c)
    votes_a = float(np.dot(scenario.electorate.group_means, p))
    votes_b = float(np.dot(scenario.electorate.group_means, q))
    n_t = scenario.electorate.n_total
    return EquilibriumResult(
        profile=profile, thresholds=ts, pivots=report,
        votes_a=votes_a, votes_b=votes_b, turnout=(votes_a + votes_b) / n_t,
        iterations=iterations, residual=update, tag=tag, pivot_method="exact",
    )


# --- scalar machinery shared by the family solvers -----------------------------


def _wta_prize_pivot_at(x: float, n_group: float, k_groups: int, zeta: float) -> float:
    """Group prize pivot at support level x, exact below RATE_SWITCH."""
    if zeta == 0.0:
        return 0.0
    lam = n_group * x
    if lam < RATE_SWITCH:
        units, _ = wta_pivot_units(np.full(k_groups, lam), "strict")
        return zeta * float(units[0])
    return pp_approx(x, n_group, k_groups, zeta)


def _method_at(x: float, n_group: float) -> str:
    return "exact" if n_group * x < RATE_SWITCH else "asymptotic"


def _bisect(fn: Callable[[float], float], lo: float, hi: float,
            max_iter: int = 200) -> Tuple[float, int, float]:
    """Sign-change bisection: fn(lo) > 0 > fn(hi); returns (root, iters, |fn|)."""
    iterations = 0
    for iterations in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if fn(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    return root, iterations, abs(fn(root))


def _support_root(n_group: float, k_groups: int, zeta: float,
                  c: float) -> Tuple[float, bool, int, float, str]:
    """Solve prize_pivot(x) = c for the support probability x in (0, 1].

    The pivot decreases from zeta (a lone vote wins outright) toward 0,
    so: no root when zeta <= c (nobody votes), saturation at x = 1 when
    even full turnout leaves the pivot above cost, and an interior
    bisection root otherwise.  Returns (x, saturated, iterations,
    residual, method-at-solution).
    """
    if zeta <= c:
        return 0.0, False, 0, 0.0, "exact"
    at_full = _wta_prize_pivot_at(1.0, n_group, k_groups, zeta)
    if at_full >= c:
        return 1.0, True, 0, 0.0, _method_at(1.0, n_group)
    lo = 1e-15
    x, iterations, residual = _bisect(
        lambda v: _wta_prize_pivot_at(v, n_group, k_groups, zeta) - c, lo, 1.0)
    return x, False, iterations, residual, _method_at(x, n_group)


def _op_pair(lam_a: float, lam_b: float) -> Tuple[float, float]:
    op_a = 0.5 * skellam_pmf(lam_a, lam_b, 0) + 0.5 * skellam_pmf(lam_a, lam_b, -1)
    op_b = -(0.5 * skellam_pmf(lam_a, lam_b, 0) + 0.5 * skellam_pmf(lam_a, lam_b, 1))
    return op_a, op_b


# --- symmetric competitive (both prizes equal, policy force active) -------------


def solve_symmetric_competitive(n_t: float, k: int, zeta: float, c: float,
                                g_noise) -> EquilibriumResult:
    """Symmetric equilibrium p = q shared by all groups.

    The marginal voter's evaluation is the (1-p) quantile of G, so the
    equilibrium condition is G^{-1}(1-p) OP_A(p, p) + PP_A(p) = c,
    solved by bisection on (0, 1/2].  When even p = 1/2 leaves the
    marginal voter strictly better off voting, the corner p = q = 1/2 is
    returned with tag "boundary".
    """
    n_group = n_t / k

    def gain(p: float) -> float:
        lam_t = n_t * p
        op_a, _ = _op_pair(lam_t, lam_t)
        return g_noise.quantile(1.0 - p) * op_a + _wta_prize_pivot_at(
            p, n_group, k, zeta) - c

    corner = gain(0.5)
    if corner > 0.0:
        p_star, iterations, residual = 0.5, 0, 0.0
        tag = TAG_BOUNDARY
    else:
        p_star, iterations, residual = _bisect(gain, 1e-12, 0.5)
        tag = TAG_CONVERGED

    profile = VoteProfile([p_star] * k, [p_star] * k)
    scenario = Scenario(Electorate([n_group] * k), profile, WTA(),
                        PrizeSpec(zeta, zeta), PreferenceModel(0.0, g_noise))
    method = _method_at(p_star, n_group)
    report = _family_report(scenario, method)
    votes = n_t * p_star
    return EquilibriumResult(
        profile=profile, thresholds=thresholds_from_report(report, 0.0, c),
        pivots=report, votes_a=votes, votes_b=votes, turnout=2.0 * p_star,
        iterations=iterations, residual=residual, tag=tag, pivot_method=method,
    )


def _family_report(scenario: Scenario, method: str) -> PivotReport:
    """Pivot report for a family solution, honoring the rate switch."""
    if method == "exact":
        return pivot_report(scenario, convention="strict")
    electorate = scenario.electorate
    rates_a = scenario.profile.rates_a(electorate)
    rates_b = scenario.profile.rates_b(electorate)
    op_a, op_b = _op_pair(float(rates_a.sum()), float(rates_b.sum()))
    k = electorate.k
    pp_a = tuple(_pp_by_method(rates_a, j, scenario.prizes.zeta_a) for j in range(k))
    pp_b = tuple(_pp_by_method(rates_b, j, scenario.prizes.zeta_b) for j in range(k))
    return PivotReport(op_a=op_a, op_b=op_b, pp_a=pp_a, pp_b=pp_b, method="asymptotic")


def _pp_by_method(rates: np.ndarray, j: int, zeta: float) -> float:
    """Asymptotic prize pivot for group j within the positive-rate competition."""
    lam = float(rates[j])
    if lam == 0.0 or zeta == 0.0:
        return 0.0
    competitors = int(np.count_nonzero(rates > 0.0))
    if competitors < 2:
        return 0.0
    return pp_approx(1.0, lam, competitors, zeta)


# --- dominant party (outcome pivot numerically zero) ----------------------------


def solve_dominant_party(n_t: float, k: int, zeta_a: float, zeta_b: float,
                         c: float) -> EquilibriumResult:
    """Equilibrium when one party's prize is large enough to dwarf the other.

    With the outcome pivot at numerical zero, each party's support level
    solves its own prize-pivot equation PP = c among the same k groups.
    The dominance premises are re-checked ex post: the outcome pivot at
    the solution must stay below 1e-12 and the A-support must exceed the
    B-support; violations are flagged, not silently dropped.
    """
    if not zeta_a > zeta_b:
        raise ValueError(f"dominant party needs zeta_A > zeta_B, got {zeta_a} <= {zeta_b}")
    n_group = n_t / k
    p, sat_a, it_a, res_a, method_a = _support_root(n_group, k, zeta_a, c)
    q, sat_b, it_b, res_b, method_b = _support_root(n_group, k, zeta_b, c)

    profile = VoteProfile([p] * k, [q] * k)
    op_a, _ = _op_pair(n_t * p, n_t * q)
    flags: Tuple[str, ...] = ()
    if op_a >= 1e-12:
        flags += ("outcome-pivot-not-negligible",)
    if p <= q:
        flags += ("dominance-violated",)

    method = method_a if method_a == method_b else "mixed"
    scenario = Scenario(Electorate([n_group] * k), profile, WTA(),
                        PrizeSpec(zeta_a, zeta_b),
                        PreferenceModel(0.0, DegenerateAtZero()))
    report = _dominant_report(scenario, method_a, method_b)
    return EquilibriumResult(
        profile=profile, thresholds=thresholds_from_report(report, 0.0, c),
        pivots=report, votes_a=n_t * p, votes_b=n_t * q,
        turnout=p + q, iterations=it_a + it_b, residual=max(res_a, res_b),
        tag=TAG_BOUNDARY if (sat_a or sat_b) else TAG_CONVERGED,
        pivot_method=method, flags=flags,
    )


def _dominant_report(scenario: Scenario, method_a: str, method_b: str) -> PivotReport:
    """Report with per-side method choice (the sides may straddle the switch)."""
    electorate = scenario.electorate
    rates_a = scenario.profile.rates_a(electorate)
    rates_b = scenario.profile.rates_b(electorate)
    op_a, op_b = _op_pair(float(rates_a.sum()), float(rates_b.sum()))
    k = electorate.k

    def side(rates: np.ndarray, zeta: float, method: str) -> Tuple[float, ...]:
        if method == "exact":
            units, _ = wta_pivot_units(rates, "strict")
            return tuple(zeta * float(u) for u in units)
        return tuple(_pp_by_method(rates, j, zeta) for j in range(k))

    method = method_a if method_a == method_b else "mixed"
    return PivotReport(op_a=op_a, op_b=op_b,
                       pp_a=side(rates_a, scenario.prizes.zeta_a, method_a),
                       pp_b=side(rates_b, scenario.prizes.zeta_b, method_b),
                       method=method)


# --- polarized groups (disjoint prize competitions) -----------------------------


def solve_polarized(n_t: float, k_a: int, k_b: int, zeta_a: float, zeta_b: float,
                    c: float) -> EquilibriumResult:
    """Equilibrium with k_a groups competing for A's prize and k_b for B's.

    Each side's support solves PP = c restricted to its own competition;
    a group on the other side faces a cross-pivot of numerical zero and
    abstains.  The result reports whether A's total expected vote
    actually exceeds B's ("dominance-violated" flag otherwise).
    """
    if k_a < 2 or k_b < 2:
        raise ValueError(
            "polarized competition needs at least two groups vying for each "
            f"prize, got k_a={k_a}, k_b={k_b}")
    k = k_a + k_b
    n_group = n_t / k
    p, sat_a, it_a, res_a, method_a = _support_root(n_group, k_a, zeta_a, c)
    q, sat_b, it_b, res_b, method_b = _support_root(n_group, k_b, zeta_b, c)

    profile = VoteProfile([p] * k_a + [0.0] * k_b, [0.0] * k_a + [q] * k_b)
    votes_a = k_a * n_group * p
    votes_b = k_b * n_group * q
    flags: Tuple[str, ...] = ()
    if votes_a <= votes_b:
        flags += ("dominance-violated",)

    method = method_a if method_a == method_b else "mixed"
    scenario = Scenario(Electorate([n_group] * k), profile, WTA(),
                        PrizeSpec(zeta_a, zeta_b),
                        PreferenceModel(0.0, DegenerateAtZero()))
    report = _dominant_report(scenario, method_a, method_b)
    return EquilibriumResult(
        profile=profile, thresholds=thresholds_from_report(report, 0.0, c),
        pivots=report, votes_a=votes_a, votes_b=votes_b,
        turnout=(votes_a + votes_b) / n_t, iterations=it_a + it_b,
        residual=max(res_a, res_b),
        tag=TAG_BOUNDARY if (sat_a or sat_b) else TAG_CONVERGED,
        pivot_method=method, flags=flags,
    )


# --- prize-only equilibrium verification ----------------------------------------


@dataclass(frozen=True)
class PrizeOnlyVerdict:
    """Pass/fail per condition of the prize-only equilibrium characterization.

    support_exists: at least two groups cast votes; common_peak: every
    supporting group either matches the maximal expected vote count or
    votes with probability one; interior_indifference: interior groups
    sit exactly on PP_A = c; abstention_unprofitable: silent groups
    cannot profit even when every supporting group delivers at most one
    vote.
    """

    support_exists: bool
    common_peak: bool
    interior_indifference: bool
    abstention_unprofitable: bool

    @property
    def ok(self) -> bool:
        return (self.support_exists and self.common_peak
                and self.interior_indifference and self.abstention_unprofitable)

    @property
    def failed(self) -> Tuple[str, ...]:
        return tuple(name for name in (
            "support_exists", "common_peak", "interior_indifference",
            "abstention_unprofitable") if not getattr(self, name))


def verify_prize_only(profile: VoteProfile, scenario: Scenario,
                      c: float) -> PrizeOnlyVerdict:
    """Check a profile against the prize-only equilibrium conditions.

    Preconditions (domain errors when violated): A's prize exceeds the
    voting cost, B offers no prize and draws no votes, and preferences
    are degenerate at zero so only the prize motive remains.
    """
    from .pivots import prize_pivot_wta
    from .special import poisson_cdf

    prizes, prefs = scenario.prizes, scenario.prefs
    if not prizes.zeta_a > c:
        raise ValueError(f"prize-only analysis needs zeta_A > c, got {prizes.zeta_a} <= {c}")
    if prizes.zeta_b != 0.0:
        raise ValueError(f"prize-only analysis needs zeta_B = 0, got {prizes.zeta_b}")
    if prefs.gamma != 0.0 or not isinstance(prefs.g, DegenerateAtZero):
        raise ValueError("prize-only analysis needs gamma = 0 and degenerate noise")
    if any(x > 0.0 for x in profile.q):
        raise ValueError("prize-only analysis needs a silent B side (all q = 0)")

    electorate = scenario.electorate
    rates = profile.rates_a(electorate)
    support = [j for j in range(electorate.k) if profile.p[j] > 0.0]
    support_exists = len(support) >= 2

    peak = max((float(rates[j]) for j in support), default=0.0)
    common_peak = all(
        profile.p[j] == 1.0 or abs(float(rates[j]) - peak) <= 1e-9 * max(1.0, peak)
        for j in support
    )

    interior = [j for j in support if profile.p[j] < 1.0]
    interior_indifference = all(
        abs(prize_pivot_wta(j, profile, electorate, prizes.zeta_a,
                            convention="strict") - c) <= 1e-8
        for j in interior
    )

    silent = [j for j in range(electorate.k) if profile.p[j] == 0.0]
    if silent:
        slack = 1.0
        for j in support:
            slack *= poisson_cdf(float(rates[j]), 1)
        abstention_unprofitable = slack <= c
    else:
        abstention_unprofitable = True

    return PrizeOnlyVerdict(
        support_exists=support_exists,
        common_peak=common_peak,
        interior_indifference=interior_indifference,
        abstention_unprofitable=abstention_unprofitable,
    )
