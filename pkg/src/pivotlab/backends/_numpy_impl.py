"""Pure-numpy kernel backend.

Defines the reference semantics for the hot kernels; the numba backend
mirrors it operation for operation.  Every Monte Carlo sample owns a
counter-based substream keyed by (seed, sample index), so estimates do
not depend on evaluation order, chunking, or thread count, and the two
backends consume identical random streams.

Keep the arithmetic here in lockstep with _numba_impl.py: same constants,
same operation order inside the samplers.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

NAME = "numpy"

# splitmix64 constants (shared verbatim with the numba backend)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_SEED_TWEAK = np.uint64(0x8A5CD789635D2DFF)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0  # 2^-53

# regime switch for the Poisson sampler: cdf inversion below, transformed
# rejection (Hormann's PTRS) at and above
_POISSON_INVERSION_CUTOFF = 30.0


def _mix64(z):
    with np.errstate(over="ignore"):  # uint64 wraparound is the point
        z = (z ^ (z >> _S30)) * _MIX1
        z = (z ^ (z >> _S27)) * _MIX2
        return z ^ (z >> _S31)


def stream_init(seed: int, n: int) -> np.ndarray:
    """Independent substream states for samples 0..n-1 under `seed`."""
    idx = np.arange(1, n + 1, dtype=np.uint64)
    base = _mix64(np.uint64(seed) ^ _SEED_TWEAK)
    with np.errstate(over="ignore"):
        return _mix64(base + _GOLDEN * idx)


def _next_uniform(state: np.ndarray, idx) -> np.ndarray:
    """Advance the substreams at `idx` by one draw; uniform in [0, 1)."""
    with np.errstate(over="ignore"):
        s = state[idx] + _GOLDEN
    state[idx] = s
    return (_mix64(s) >> _S11).astype(np.float64) * _INV53


def _poisson_fill(lam: float, state: np.ndarray, idx: np.ndarray, out: np.ndarray) -> None:
    """Draw Poisson(lam) into out[idx], consuming from each sample's stream."""
    if lam <= 0.0:
        out[idx] = 0
        return
    if lam < _POISSON_INVERSION_CUTOFF:
        # one uniform per sample, then walk the cdf
        u = _next_uniform(state, idx)
        p0 = math.exp(-lam)
        p = np.full(idx.shape[0], p0)
        c = np.full(idx.shape[0], p0)
        x = np.zeros(idx.shape[0], dtype=np.int64)
        active = u > c
        k = 0
        while active.any():
            k += 1
            if k > 220:  # Pr(X > 220 | lam < 30) < 1e-100; guards degenerate u
                break
            p[active] *= lam / k
            c[active] += p[active]
            x[active] = k
            active[active] = u[active] > c[active]
        out[idx] = x
        return
    # PTRS transformed rejection; two uniforms per attempt
    slam = math.sqrt(lam)
    loglam = math.log(lam)
    b = 0.931 + 2.53 * slam
    a = -0.059 + 0.02483 * b
    invalpha = 1.1239 + 1.1328 / (b - 3.4)
    vr = 0.9277 - 3.6224 / (b - 2.0)
    pending = idx
    while pending.size:
        u = _next_uniform(state, pending) - 0.5
        v = _next_uniform(state, pending)
        us = 0.5 - np.abs(u)
        kf = np.floor((2.0 * a / us + b) * u + lam + 0.43)
        acc = (us >= 0.07) & (v <= vr)
        rej = (kf < 0.0) | ((us < 0.013) & (v > us))
        rest = ~(acc | rej)
        if rest.any():
            usr = us[rest]
            lhs = np.log(v[rest]) + math.log(invalpha) - np.log(a / (usr * usr) + b)
            rhs = kf[rest] * loglam - lam - gammaln(kf[rest] + 1.0)
            acc[rest] = lhs <= rhs
        out[pending[acc]] = kf[acc].astype(np.int64)
        pending = pending[~acc]


def poisson_sample(lam: float, samples: int, seed: int) -> np.ndarray:
    state = stream_init(seed, samples)
    out = np.empty(samples, dtype=np.int64)
    _poisson_fill(lam, state, np.arange(samples), out)
    return out


def mc_outcome_counts(lam_a: float, lam_b: float, samples: int, seed: int):
    """Counts of {A = B} and {A = B - 1} over per-sample substreams."""
    state = stream_init(seed, samples)
    idx = np.arange(samples)
    a = np.empty(samples, dtype=np.int64)
    b = np.empty(samples, dtype=np.int64)
    _poisson_fill(lam_a, state, idx, a)
    _poisson_fill(lam_b, state, idx, b)
    n_eq = int(np.count_nonzero(a == b))
    n_am1 = int(np.count_nonzero(b == a + 1))
    return n_eq, n_am1


def mc_wta_pivot_count(lams: np.ndarray, k: int, strict: bool, samples: int, seed: int) -> int:
    """Samples where one extra vote for group k flips its prize under WTA.

    Common random numbers: the same draw decides both the with-vote and
    without-vote worlds, so the difference is a {0,1} indicator.
    """
    kk = int(k)
    nk = lams.shape[0]
    state = stream_init(seed, samples)
    idx = np.arange(samples)
    draws = np.empty((nk, samples), dtype=np.int64)
    for j in range(nk):
        _poisson_fill(float(lams[j]), state, idx, draws[j])
    own = draws[kk]
    rival = np.zeros(samples, dtype=np.int64)
    first = True
    for j in range(nk):
        if j == kk:
            continue
        if first:
            rival[:] = draws[j]
            first = False
        else:
            np.maximum(rival, draws[j], out=rival)
    win0 = own >= rival
    if strict:
        win0 &= own > 0
    win1 = own + 1 >= rival
    return int(np.count_nonzero(win1 & ~win0))


def mc_threshold_pivot_count(lam_k: float, t: int, samples: int, seed: int) -> int:
    """Samples where group k sits exactly one vote below the threshold."""
    state = stream_init(seed, samples)
    a = np.empty(samples, dtype=np.int64)
    _poisson_fill(lam_k, state, np.arange(samples), a)
    return int(np.count_nonzero(a == t - 1))


def mc_election_stats(lams_a, lams_b, rule_code: int, t: int, members, samples: int,
                      seed: int, hist_cap: int):
    """Full-election summary: win counts, per-group prize counts, histograms.

    rule_code: 0 = WTA (winner needs positive votes), 1 = threshold,
    2 = specific (membership mask), 3 = proportionate (accumulates vote
    totals instead of award counts).
    """
    nk = lams_a.shape[0]
    state = stream_init(seed, samples)
    idx = np.arange(samples)
    a = np.empty((nk, samples), dtype=np.int64)
    b = np.empty((nk, samples), dtype=np.int64)
    for j in range(nk):
        _poisson_fill(float(lams_a[j]), state, idx, a[j])
    for j in range(nk):
        _poisson_fill(float(lams_b[j]), state, idx, b[j])
    tot_a = a.sum(axis=0)
    tot_b = b.sum(axis=0)
    wins_a = int(np.count_nonzero(tot_a > tot_b))
    ties = int(np.count_nonzero(tot_a == tot_b))
    prize_a = np.zeros(nk, dtype=np.int64)
    prize_b = np.zeros(nk, dtype=np.int64)
    for side, draws, acc in ((0, a, prize_a), (1, b, prize_b)):
        if rule_code == 0:
            mx = draws.max(axis=0)
            pos = mx > 0
            for j in range(nk):
                acc[j] = np.count_nonzero((draws[j] == mx) & pos)
        elif rule_code == 1:
            for j in range(nk):
                acc[j] = np.count_nonzero(draws[j] >= t)
        elif rule_code == 2:
            for j in range(nk):
                acc[j] = int(members[j]) * samples
        else:
            for j in range(nk):
                acc[j] = draws[j].sum()
    hist_a = np.bincount(np.minimum(tot_a, hist_cap), minlength=hist_cap + 1).astype(np.int64)
    hist_b = np.bincount(np.minimum(tot_b, hist_cap), minlength=hist_cap + 1).astype(np.int64)
    return wins_a, ties, prize_a, prize_b, hist_a, hist_b


def wta_pivot_unit(lams: np.ndarray, strict: bool):
    """Unit-prize WTA pivot for every group, plus the truncation tail bound.

    For group k:  sum_a f_k(a) * (prod_{j!=k} F_j(a+1) - prod_{j!=k} F_j(a)),
    with f_k(0) * prod_{j!=k} F_j(0) added under the strict convention.
    Truncated at a* = ceil(max lam + 12 sqrt(max lam) + 20); each group's
    neglected mass is below 1 - F_k(a*), reported as the bound.
    """
    lams = np.asarray(lams, dtype=np.float64)
    nk = lams.shape[0]
    lmax = float(lams.max()) if nk else 0.0
    astar = int(math.ceil(lmax + 12.0 * math.sqrt(lmax) + 20.0))
    width = astar + 2
    av = np.arange(width, dtype=np.float64)
    pmf = np.empty((nk, width))
    for j in range(nk):
        lam = float(lams[j])
        if lam == 0.0:
            pmf[j] = 0.0
            pmf[j, 0] = 1.0
        else:
            pmf[j] = np.exp(av * math.log(lam) - lam - gammaln(av + 1.0))
    cdf = np.cumsum(pmf, axis=1)
    tail = float(np.max(1.0 - cdf[:, astar])) if nk else 0.0
    tail = max(tail, 0.0)
    np.minimum(cdf, 1.0, out=cdf)
    # leave-one-out cdf products via prefix/suffix sweeps over groups
    pref = np.ones((nk + 1, width))
    for j in range(nk):
        pref[j + 1] = pref[j] * cdf[j]
    suf = np.ones((nk + 1, width))
    for j in range(nk - 1, -1, -1):
        suf[j] = suf[j + 1] * cdf[j]
    unit = np.empty(nk)
    for j in range(nk):
        loo = pref[j] * suf[j + 1]
        unit[j] = float(np.dot(pmf[j, : astar + 1], loo[1 : astar + 2] - loo[: astar + 1]))
        if strict:
            unit[j] += pmf[j, 0] * loo[0]
    return unit, tail
