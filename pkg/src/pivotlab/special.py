"""Scalar special functions for Poisson voting pivots.

Probability masses in large electorates underflow double precision long
before the quantities built from them do (a Skellam mass at lambda = 3e4
is the product of e^-60000 and a Bessel term of matching magnitude), so
every composite here is assembled as a sum of logs and exponentiated
last.  Functions are scalar; the vectorized hot paths live in
``pivotlab.backends`` and are cross-checked against these in the tests.
"""

from __future__ import annotations

import math

from scipy.special import ndtri

__all__ = [
    "poisson_log_pmf",
    "poisson_pmf",
    "poisson_cdf",
    "bessel_i_scaled",
    "skellam_log_pmf",
    "skellam_pmf",
    "gaussian_pdf",
    "gaussian_cdf",
    "gaussian_quantile",
    "inverse_mills",
]

_SQRT2 = math.sqrt(2.0)
_SQRT_2PI = math.sqrt(2.0 * math.pi)

# Evaluation regimes for the scaled Bessel function: power series up to
# this argument, asymptotic expansion beyond it.
_BESSEL_SERIES_CUTOFF = 30.0


def _check_count(x, name: str) -> int:
    xf = float(x)
    if not xf.is_integer():
        raise ValueError(f"{name} must be an integer, got {x!r}")
    return int(xf)


def poisson_log_pmf(lam: float, x) -> float:
    """log Pr(X = x) for X ~ Poisson(lam).

    Returns -inf for x < 0.  lam = 0 is the unit mass at zero.
    """
    if lam < 0 or math.isnan(lam):
        raise ValueError(f"poisson rate must be >= 0, got {lam!r}")
    x = _check_count(x, "x")
    if x < 0:
        return -math.inf
    if lam == 0.0:
        return 0.0 if x == 0 else -math.inf
    return x * math.log(lam) - lam - math.lgamma(x + 1.0)


def poisson_pmf(lam: float, x) -> float:
    return math.exp(poisson_log_pmf(lam, x))


def poisson_cdf(lam: float, x) -> float:
    """Pr(X <= x) for X ~ Poisson(lam).

    Summed as term ratios relative to the largest included mass (the
    mode, or x itself when x sits below the mode), so the partial sum
    never touches underflowing magnitudes; the anchor's log is added
    back at the end.
    """
    if lam < 0 or math.isnan(lam):
        raise ValueError(f"poisson rate must be >= 0, got {lam!r}")
    x = math.floor(x)
    if x < 0:
        return 0.0
    if lam == 0.0:
        return 1.0
    anchor = min(x, int(math.floor(lam)))
    log_anchor = poisson_log_pmf(lam, anchor)
    total = 1.0
    # downward from the anchor: ratios z/lam < 1, monotone decay
    term = 1.0
    z = anchor
    while z > 0:
        term *= z / lam
        if term < 1e-20:
            break
        total += term
        z -= 1
    # upward from the anchor to x: ratios lam/(z+1) < 1 above the mode
    term = 1.0
    z = anchor
    while z < x:
        term *= lam / (z + 1)
        if term < 1e-20:
            break
        total += term
        z += 1
    return min(1.0, math.exp(log_anchor + math.log(total)))


def bessel_i_scaled(m, x: float) -> float:
    """Exponentially scaled modified Bessel function e^-x I_m(x), m >= 0.

    Power series sum_k (x/2)^(m+2k) / (k! (m+k)!) for x <= 30; beyond
    that the large-argument expansion

        I_m(x) ~ e^x / sqrt(2 pi x) * (1 - (mu-1)/(8x)
                 + (mu-1)(mu-9)/(2!(8x)^2) - ...),   mu = 4 m^2,

    summed until terms stop improving (at least four are always taken;
    near the cutoff the expansion still has ~15 decreasing terms, which
    keeps the two regimes consistent to well under 1e-10).
    """
    m = _check_count(m, "order m")
    if m < 0:
        raise ValueError(f"order m must be >= 0, got {m}")
    if x < 0 or math.isnan(x):
        raise ValueError(f"argument must be >= 0, got {x!r}")
    if x == 0.0:
        return 1.0 if m == 0 else 0.0
    if x <= _BESSEL_SERIES_CUTOFF:
        q = 0.25 * x * x
        term = math.exp(m * math.log(0.5 * x) - math.lgamma(m + 1.0))
        total = term
        k = 0
        while True:
            k += 1
            term *= q / (k * (m + k))
            total += term
            if term <= total * 1e-18:
                break
        return math.exp(-x) * total
    mu = 4.0 * m * m
    inv8x = 1.0 / (8.0 * x)
    term = 1.0
    total = 1.0
    prev = math.inf
    for j in range(1, 40):
        term *= -(mu - (2.0 * j - 1.0) ** 2) * inv8x / j
        if j > 4 and abs(term) >= prev:
            break  # asymptotic tail started diverging; stop at the best term
        total += term
        prev = abs(term)
        if abs(term) <= abs(total) * 1e-18:
            break
    return total / math.sqrt(2.0 * math.pi * x)


def skellam_log_pmf(lam1: float, lam2: float, m) -> float:
    """log Pr(N1 - N2 = m) for independent N1 ~ Poisson(lam1), N2 ~ Poisson(lam2).

    Uses Sk(m) = e^-(l1+l2) (l1/l2)^(m/2) I_|m|(2 sqrt(l1 l2)) with the
    scaled Bessel factor, so the exponent collapses to
    -(sqrt(l1)-sqrt(l2))^2, which stays modest even when l1+l2 is in the
    tens of thousands.
    """
    if lam1 < 0 or lam2 < 0 or math.isnan(lam1) or math.isnan(lam2):
        raise ValueError("poisson rates must be >= 0")
    m = _check_count(m, "m")
    if lam1 == 0.0 and lam2 == 0.0:
        return 0.0 if m == 0 else -math.inf
    if lam2 == 0.0:
        return poisson_log_pmf(lam1, m) if m >= 0 else -math.inf
    if lam1 == 0.0:
        return poisson_log_pmf(lam2, -m) if m <= 0 else -math.inf
    s1 = math.sqrt(lam1)
    s2 = math.sqrt(lam2)
    scaled = bessel_i_scaled(abs(m), 2.0 * s1 * s2)
    return (
        -((s1 - s2) ** 2)
        + 0.5 * m * (math.log(lam1) - math.log(lam2))
        + math.log(scaled)
    )


def skellam_pmf(lam1: float, lam2: float, m) -> float:
    lp = skellam_log_pmf(lam1, lam2, m)
    return 0.0 if lp == -math.inf else math.exp(lp)


def gaussian_pdf(u: float) -> float:
    return math.exp(-0.5 * u * u) / _SQRT_2PI


def gaussian_cdf(u: float) -> float:
    if math.isnan(u):
        raise ValueError("gaussian_cdf: nan input")
    return 0.5 * math.erfc(-u / _SQRT2)


def gaussian_quantile(u: float) -> float:
    """Inverse of gaussian_cdf on (0, 1)."""
    if not 0.0 < u < 1.0:
        raise ValueError(f"quantile needs 0 < u < 1, got {u!r}")
    return float(ndtri(u))


def inverse_mills(u: float) -> float:
    """phi(u) / Phi(u), the lower-tail hazard of the standard normal.

    Direct evaluation loses Phi(u) to underflow near u ~ -37; below -30
    the continued tail expansion
        Phi(u) = phi(u)/(-u) * (1 - u^-2 + 3 u^-4 - 15 u^-6 + ...)
    gives the ratio as -u / (series) with relative error < 1e-14.
    """
    if math.isnan(u):
        raise ValueError("inverse_mills: nan input")
    if u < -30.0:
        w = 1.0 / (u * u)
        series = 1.0 + w * (-1.0 + w * (3.0 + w * (-15.0 + w * (105.0 - 945.0 * w))))
        return -u / series
    return gaussian_pdf(u) / gaussian_cdf(u)
