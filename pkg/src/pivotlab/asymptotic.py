"""Large-population pivot approximations.

The outcome pivot admits a closed-form approximation whose error decays
with the electorate size.  The winner-take-all prize pivot, for K
equally supported groups of mean size n, concentrates around the point
where a challenger group just overtakes the focal group; a saddle-point
(Laplace) evaluation of the defining sum gives

    pp  ~=  zeta * Q(K) / sqrt(n p),

with Q(K) depending only on the group count.  The stationary point is
the root of x = ((K-2)/2) * mills(x), with mills the inverse Mills
ratio; the root is bracketed by [0, (K-2)/sqrt(2 pi)].

At K = 2 the Laplace machinery degenerates (the stationary point sits
at the boundary x = 0) and the two-group pivot is a Skellam point mass,
so pp_approx dispatches to that form; the pure Laplace value at K = 2,
zeta / (2 sqrt(pi n p)), stays available as pp_laplace and is what the
lower bound is tight against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .special import gaussian_cdf, inverse_mills, skellam_pmf

_BRACKET_SCALE = 1.0 / math.sqrt(2.0 * math.pi)


def op_approx(p: float, q: float, n_t: float) -> float:
    """Closed-form outcome-pivot approximation; needs p, q, n_T > 0."""
    if not (p > 0.0 and q > 0.0):
        raise ValueError(f"op_approx needs p, q > 0, got p={p}, q={q}")
    if not n_t > 0.0:
        raise ValueError(f"op_approx needs n_T > 0, got {n_t}")
    sp, sq = math.sqrt(p), math.sqrt(q)
    # assembled in log space: the exponential underflows long before the
    # prefactors do
    log_val = (
        -0.25 * math.log(p * q)
        - math.log(2.0)
        - 0.5 * math.log(math.pi * n_t)
        + math.log(sp + sq)
        - math.log(2.0 * sp)
        - n_t * (sp - sq) ** 2
    )
    return math.exp(log_val)


@dataclass(frozen=True)
class LaplaceSolution:
    """Saddle-point data for the K-group prize-pivot approximation."""

    k: int  # number of competing groups
    x0: float  # standardized stationary point, sqrt(n)(alpha0 - p)/sqrt(p)
    alpha0: float  # stationary point on the vote-count scale
    nh: float  # n * h_n(alpha0), the log of the exponential factor
    h2: float  # |h_n''(alpha0)|
    q_factor: float  # Q(K): pp ~= zeta * Q / sqrt(n p)

    @property
    def residual(self) -> float:
        """How far x0 is from solving its stationarity equation."""
        return abs(self.x0 - 0.5 * (self.k - 2) * inverse_mills(self.x0))


def solve_alpha0(p: float, n: float, k: int) -> LaplaceSolution:
    """Stationary point and prefactor for K groups at support level p.

    Solves x = ((K-2)/2) * mills(x) by Newton steps safeguarded to the
    bracket [0, (K-2)/sqrt(2 pi)]; the map is strictly increasing in x
    minus the right side, so the root is unique.
    """
    if k < 2:
        raise ValueError(f"prize competition needs K >= 2 groups, got {k}")
    if not (0.0 < p <= 1.0):
        raise ValueError(f"support level p must lie in (0, 1], got {p}")
    if not n > 0.0:
        raise ValueError(f"group size n must be > 0, got {n}")
    kappa = 0.5 * (k - 2)
    lo, hi = 0.0, (k - 2) * _BRACKET_SCALE
    if kappa == 0.0:
        x0 = 0.0
    else:
        x0 = 0.5 * hi
        for _ in range(200):
            r = inverse_mills(x0)
            f = x0 - kappa * r
            if abs(f) < 1e-14 * max(1.0, x0):
                break
            if f > 0.0:
                hi = x0
            else:
                lo = x0
            fprime = 1.0 + kappa * r * (x0 + r)
            nxt = x0 - f / fprime
            if not (lo < nxt < hi):
                nxt = 0.5 * (lo + hi)  # bisect when Newton leaves the bracket
            if nxt == x0:  # bracket exhausted at float resolution
                break
            x0 = nxt
        if abs(x0 - kappa * inverse_mills(x0)) >= 1e-12:
            raise RuntimeError(f"stationary-point iteration failed for K={k}")
    r0 = inverse_mills(x0)
    nh = -x0 * x0 + (k - 2) * math.log(gaussian_cdf(x0))
    curvature = k * (k - 2) * 0.25 * r0 * r0  # h2 = (2/p)(1 + curvature)
    h2 = (2.0 / p) * (1.0 + curvature)
    q_factor = (k - 1) * math.exp(nh) / (2.0 * math.sqrt(math.pi * (1.0 + curvature)))
    return LaplaceSolution(
        k=k,
        x0=x0,
        alpha0=p + x0 * math.sqrt(p) / math.sqrt(n),
        nh=nh,
        h2=h2,
        q_factor=q_factor,
    )


def pp_laplace(p: float, n: float, k: int, zeta: float) -> float:
    """Pure Laplace-form prize pivot, valid for K >= 2."""
    sol = solve_alpha0(p, n, k)
    return zeta * sol.q_factor / math.sqrt(n * p)


def pp_approx(p: float, n: float, k: int, zeta: float) -> float:
    """Prize-pivot approximation for K equal groups of mean size n.

    K = 2 uses the exact two-group Skellam form; K >= 3 the Laplace
    form.
    """
    if k < 2:
        raise ValueError(f"prize competition needs K >= 2 groups, got {k}")
    if k == 2:
        lam = n * p
        return zeta * skellam_pmf(lam, lam, 1)
    return pp_laplace(p, n, k, zeta)


def pp_lower_bound(p: float, n: float, k: int, zeta: float) -> float:
    """Closed-form lower bound on the Laplace-form pivot; tight at K=2."""
    if k < 2:
        raise ValueError(f"prize competition needs K >= 2 groups, got {k}")
    num = (k - 1) * math.exp(-((k - 2) ** 2) / (2.0 * math.pi)) * 2.0 ** (2 - k)
    den = math.sqrt(2.0) * math.sqrt(k * k - 2.0 * k + 2.0 * math.pi)
    return zeta / math.sqrt(p * n) * num / den


def _symmetric_rate(rates) -> float:
    lam = float(rates[0])
    for r in rates:
        if abs(float(r) - lam) > 1e-9 * max(1.0, lam):
            raise ValueError(
                "the prize-pivot approximation covers equal group rates only; "
                "use the exact method for asymmetric profiles"
            )
    return lam


def pivot_report_approx(scenario):
    """Asymptotic PivotReport for a scenario with equal per-group rates.

    Outcome pivots use op_approx on the aggregate probabilities; the
    winner-take-all prize pivots use the symmetric approximation (which
    needs every group's vote rate equal); the other rules keep their
    closed forms, which are already exact.
    """
    from .model import WTA
    from .pivots import PivotReport, _prize_pivots_for_party, outcome_pivot_a, outcome_pivot_b

    electorate = scenario.electorate
    profile = scenario.profile
    if profile.aggregate_p(electorate) > 0.0 and profile.aggregate_q(electorate) > 0.0:
        op_a = op_approx(profile.aggregate_p(electorate), profile.aggregate_q(electorate),
                         electorate.n_total)
        op_b = -op_approx(profile.aggregate_q(electorate), profile.aggregate_p(electorate),
                          electorate.n_total)
    else:
        # the closed form needs both aggregates positive; with a silent
        # side the exact Skellam expressions are cheap, so use those
        op_a = outcome_pivot_a(profile, electorate)
        op_b = outcome_pivot_b(profile, electorate)
    if isinstance(scenario.rule, WTA):
        k = electorate.k
        pps = []
        for rates, zeta in ((profile.rates_a(electorate), scenario.prizes.zeta_a),
                            (profile.rates_b(electorate), scenario.prizes.zeta_b)):
            lam = _symmetric_rate(rates)
            # a silent field casts no pivotal vote in the large-population
            # limit; the K=2 dispatch returns literally zero there too
            val = 0.0 if lam == 0.0 else pp_approx(1.0, lam, k, zeta)
            pps.append(tuple(val for _ in range(k)))
        pp_a, pp_b = pps
    else:
        pp_a, _ = _prize_pivots_for_party(scenario, "A", "strict")
        pp_b, _ = _prize_pivots_for_party(scenario, "B", "strict")
    return PivotReport(op_a=op_a, op_b=op_b, pp_a=pp_a, pp_b=pp_b, method="asymptotic")
