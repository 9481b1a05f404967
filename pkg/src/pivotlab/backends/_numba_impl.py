"""Numba kernel backend.

Same kernel surface and random streams as _numpy_impl; scalar loops
under @njit instead of vectorized sweeps.  MC kernels reduce over
integers only, so prange parallelism cannot perturb results; the WTA
sum keeps ordered float accumulation and stays serial.

Keep the arithmetic in lockstep with _numpy_impl.py.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit, prange

NAME = "numba"

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_SEED_TWEAK = np.uint64(0x8A5CD789635D2DFF)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0

_POISSON_INVERSION_CUTOFF = 30.0


@njit(cache=True)
def _mix64(z):
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


@njit(cache=True)
def _stream_init(seed, i):
    base = _mix64(np.uint64(seed) ^ _SEED_TWEAK)
    return _mix64(base + _GOLDEN * (np.uint64(i) + np.uint64(1)))


@njit(cache=True)
def _next_uniform(state):
    s = state + _GOLDEN
    return np.float64(_mix64(s) >> _S11) * _INV53, s


@njit(cache=True)
def _poisson_draw(lam, state):
    if lam <= 0.0:
        return 0, state
    if lam < _POISSON_INVERSION_CUTOFF:
        u, state = _next_uniform(state)
        p = math.exp(-lam)
        c = p
        x = 0
        while u > c and x <= 220:
            x += 1
            p *= lam / x
            c += p
        return x, state
    slam = math.sqrt(lam)
    loglam = math.log(lam)
    b = 0.931 + 2.53 * slam
    a = -0.059 + 0.02483 * b
    invalpha = 1.1239 + 1.1328 / (b - 3.4)
    vr = 0.9277 - 3.6224 / (b - 2.0)
    while True:
        u, state = _next_uniform(state)
        u -= 0.5
        v, state = _next_uniform(state)
        us = 0.5 - abs(u)
        kf = math.floor((2.0 * a / us + b) * u + lam + 0.43)
        if us >= 0.07 and v <= vr:
            return int(kf), state
        if kf < 0.0 or (us < 0.013 and v > us):
            continue
        if (math.log(v) + math.log(invalpha) - math.log(a / (us * us) + b)
                <= kf * loglam - lam - math.lgamma(kf + 1.0)):
            return int(kf), state


@njit(cache=True, parallel=True)
def poisson_sample(lam, samples, seed):
    out = np.empty(samples, dtype=np.int64)
    for i in prange(samples):
        st = _stream_init(seed, i)
        x, st = _poisson_draw(lam, st)
        out[i] = x
    return out


@njit(cache=True, parallel=True)
def mc_outcome_counts(lam_a, lam_b, samples, seed):
    n_eq = 0
    n_am1 = 0
    for i in prange(samples):
        st = _stream_init(seed, i)
        a, st = _poisson_draw(lam_a, st)
        b, st = _poisson_draw(lam_b, st)
        if a == b:
            n_eq += 1
        if b == a + 1:
            n_am1 += 1
    return n_eq, n_am1


@njit(cache=True, parallel=True)
def mc_wta_pivot_count(lams, k, strict, samples, seed):
    nk = lams.shape[0]
    count = 0
    for i in prange(samples):
        st = _stream_init(seed, i)
        own = 0
        rival = -1
        for j in range(nk):
            x, st = _poisson_draw(lams[j], st)
            if j == k:
                own = x
            elif x > rival:
                rival = x
        win0 = own >= rival and (own > 0 or not strict)
        win1 = own + 1 >= rival
        if win1 and not win0:
            count += 1
    return count


@njit(cache=True, parallel=True)
def mc_threshold_pivot_count(lam_k, t, samples, seed):
    count = 0
    for i in prange(samples):
        st = _stream_init(seed, i)
        a, st = _poisson_draw(lam_k, st)
        if a == t - 1:
            count += 1
    return count


@njit(cache=True)
def mc_election_stats(lams_a, lams_b, rule_code, t, members, samples, seed, hist_cap):
    nk = lams_a.shape[0]
    wins_a = 0
    ties = 0
    prize_a = np.zeros(nk, dtype=np.int64)
    prize_b = np.zeros(nk, dtype=np.int64)
    hist_a = np.zeros(hist_cap + 1, dtype=np.int64)
    hist_b = np.zeros(hist_cap + 1, dtype=np.int64)
    a = np.empty(nk, dtype=np.int64)
    b = np.empty(nk, dtype=np.int64)
    for i in range(samples):
        st = _stream_init(seed, i)
        tot_a = 0
        tot_b = 0
        for j in range(nk):
            x, st = _poisson_draw(lams_a[j], st)
            a[j] = x
            tot_a += x
        for j in range(nk):
            x, st = _poisson_draw(lams_b[j], st)
            b[j] = x
            tot_b += x
        if tot_a > tot_b:
            wins_a += 1
        elif tot_a == tot_b:
            ties += 1
        hist_a[min(tot_a, hist_cap)] += 1
        hist_b[min(tot_b, hist_cap)] += 1
        if rule_code == 0:
            mx_a = 0
            mx_b = 0
            for j in range(nk):
                if a[j] > mx_a:
                    mx_a = a[j]
                if b[j] > mx_b:
                    mx_b = b[j]
            for j in range(nk):
                if mx_a > 0 and a[j] == mx_a:
                    prize_a[j] += 1
                if mx_b > 0 and b[j] == mx_b:
                    prize_b[j] += 1
        elif rule_code == 1:
            for j in range(nk):
                if a[j] >= t:
                    prize_a[j] += 1
                if b[j] >= t:
                    prize_b[j] += 1
        elif rule_code == 2:
            for j in range(nk):
                if members[j]:
                    prize_a[j] += 1
                    prize_b[j] += 1
        else:
            for j in range(nk):
                prize_a[j] += a[j]
                prize_b[j] += b[j]
    return wins_a, ties, prize_a, prize_b, hist_a, hist_b


@njit(cache=True)
def wta_pivot_unit(lams, strict):
    nk = lams.shape[0]
    lmax = 0.0
    for j in range(nk):
        if lams[j] > lmax:
            lmax = lams[j]
    astar = int(math.ceil(lmax + 12.0 * math.sqrt(lmax) + 20.0))
    width = astar + 2
    pmf = np.empty((nk, width))
    cdf = np.empty((nk, width))
    tail = 0.0
    for j in range(nk):
        lam = lams[j]
        if lam == 0.0:
            for aa in range(width):
                pmf[j, aa] = 0.0
            pmf[j, 0] = 1.0
        else:
            llam = math.log(lam)
            for aa in range(width):
                pmf[j, aa] = math.exp(aa * llam - lam - math.lgamma(aa + 1.0))
        run = 0.0
        for aa in range(width):
            run += pmf[j, aa]
            cdf[j, aa] = run if run < 1.0 else 1.0
        g = 1.0 - cdf[j, astar]
        if g > tail:
            tail = g
    pref = np.ones((nk + 1, width))
    for j in range(nk):
        for aa in range(width):
            pref[j + 1, aa] = pref[j, aa] * cdf[j, aa]
    suf = np.ones((nk + 1, width))
    for j in range(nk - 1, -1, -1):
        for aa in range(width):
            suf[j, aa] = suf[j + 1, aa] * cdf[j, aa]
    unit = np.empty(nk)
    for j in range(nk):
        acc = 0.0
        for aa in range(astar + 1):
            loo0 = pref[j, aa] * suf[j + 1, aa]
            loo1 = pref[j, aa + 1] * suf[j + 1, aa + 1]
            acc += pmf[j, aa] * (loo1 - loo0)
        if strict:
            acc += pmf[j, 0] * (pref[j, 0] * suf[j + 1, 0])
        unit[j] = acc
    return unit, tail
