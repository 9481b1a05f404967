"""Scenario data model.

Electorates, vote profiles, prize allocation rules, prize specs, and the
voter preference model, plus validation and (de)serialization.  All
types are immutable after construction and safe to share.

Group sizes are expected counts and may be non-integral (population
means, not headcounts).  A vote profile holds per-group probabilities
(p_k, q_k) of voting for party A resp. B; group k then casts
Poisson(n_k p_k) A-votes and Poisson(n_k q_k) B-votes.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .special import gaussian_cdf, gaussian_quantile

SCHEMA_VERSION = 1


class ScenarioError(ValueError):
    """Raised when a scenario fails validation; carries the violation list."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(violations))


@dataclass(frozen=True)
class Electorate:
    """Expected group sizes n_k; the population total is their sum."""

    group_means: tuple[float, ...]

    def __init__(self, group_means: Sequence[float]):
        object.__setattr__(self, "group_means", tuple(float(n) for n in group_means))

    @property
    def k(self) -> int:
        return len(self.group_means)

    @property
    def n_total(self) -> float:
        return sum(self.group_means)


@dataclass(frozen=True)
class VoteProfile:
    """Per-group vote probabilities (p_k for party A, q_k for party B)."""

    p: tuple[float, ...]
    q: tuple[float, ...]

    def __init__(self, p: Sequence[float], q: Sequence[float]):
        object.__setattr__(self, "p", tuple(float(x) for x in p))
        object.__setattr__(self, "q", tuple(float(x) for x in q))

    def rates_a(self, electorate: Electorate) -> np.ndarray:
        """Poisson vote-count means n_k p_k, one per group."""
        return np.array([n * x for n, x in zip(electorate.group_means, self.p)])

    def rates_b(self, electorate: Electorate) -> np.ndarray:
        return np.array([n * x for n, x in zip(electorate.group_means, self.q)])

    def aggregate_p(self, electorate: Electorate) -> float:
        """Population-weighted mean probability p = sum n_k p_k / n_T."""
        return float(sum(n * x for n, x in zip(electorate.group_means, self.p))
                     / electorate.n_total)

    def aggregate_q(self, electorate: Electorate) -> float:
        return float(sum(n * x for n, x in zip(electorate.group_means, self.q))
                     / electorate.n_total)


# --- prize allocation rules ------------------------------------------------


@dataclass(frozen=True)
class WTA:
    """Prize to the group(s) delivering the most votes for the party."""

    kind = "wta"


@dataclass(frozen=True)
class Specific:
    """Prize to a fixed member set regardless of votes delivered."""

    members: frozenset[int]
    kind = "specific"

    def __init__(self, members):
        object.__setattr__(self, "members", frozenset(int(i) for i in members))


@dataclass(frozen=True)
class Threshold:
    """Prize to every group delivering at least t votes."""

    t: int
    kind = "threshold"

    def __init__(self, t: int):
        object.__setattr__(self, "t", int(t))


@dataclass(frozen=True)
class Proportionate:
    """Reward rho per vote delivered."""

    rho: float
    kind = "proportionate"

    def __init__(self, rho: float):
        object.__setattr__(self, "rho", float(rho))


PrizeRule = Union[WTA, Specific, Threshold, Proportionate]

NONRIVAL = "nonrival"
RIVAL = "rival"


@dataclass(frozen=True)
class PrizeSpec:
    """Prize values per party and whether provision cost scales with size."""

    zeta_a: float
    zeta_b: float
    rivalry: str = NONRIVAL

    def __init__(self, zeta_a: float, zeta_b: float, rivalry: str = NONRIVAL):
        object.__setattr__(self, "zeta_a", float(zeta_a))
        object.__setattr__(self, "zeta_b", float(zeta_b))
        object.__setattr__(self, "rivalry", str(rivalry))


# --- preference model ------------------------------------------------------


@dataclass(frozen=True)
class Gaussian:
    """Evaluation noise e ~ N(mean, variance)."""

    mean: float
    variance: float
    kind = "gaussian"

    def __init__(self, mean: float, variance: float):
        object.__setattr__(self, "mean", float(mean))
        object.__setattr__(self, "variance", float(variance))

    def cdf(self, x: float) -> float:
        if math.isinf(x):
            return 1.0 if x > 0 else 0.0
        return gaussian_cdf((x - self.mean) / math.sqrt(self.variance))

    def quantile(self, u: float) -> float:
        return self.mean + math.sqrt(self.variance) * gaussian_quantile(u)


@dataclass(frozen=True)
class DegenerateAtZero:
    """All evaluation noise at zero: G(x) = 1{x >= 0}."""

    kind = "degenerate"

    def cdf(self, x: float) -> float:
        return 1.0 if x >= 0 else 0.0

    def quantile(self, u: float) -> float:
        return 0.0


@dataclass(frozen=True)
class Tabulated:
    """Piecewise-linear cdf through (x_i, u_i) knots; 0 below, 1 above."""

    x: tuple[float, ...]
    u: tuple[float, ...]
    kind = "tabulated"

    def __init__(self, x: Sequence[float], u: Sequence[float]):
        object.__setattr__(self, "x", tuple(float(v) for v in x))
        object.__setattr__(self, "u", tuple(float(v) for v in u))

    def cdf(self, x: float) -> float:
        xs, us = self.x, self.u
        if x < xs[0]:
            return 0.0
        if x >= xs[-1]:
            return 1.0
        return float(np.interp(x, xs, us))

    def quantile(self, u: float) -> float:
        # inverse of the piecewise-linear cdf; flat stretches map to their
        # left endpoint
        xs, us = np.asarray(self.x), np.asarray(self.u)
        if u <= us[0]:
            return float(xs[0])
        if u >= us[-1]:
            return float(xs[-1])
        j = int(np.searchsorted(us, u, side="left"))
        lo, hi = us[j - 1], us[j]
        if hi == lo:
            return float(xs[j])
        w = (u - lo) / (hi - lo)
        return float(xs[j - 1] + w * (xs[j] - xs[j - 1]))


NoiseCdf = Union[Gaussian, DegenerateAtZero, Tabulated]


@dataclass(frozen=True)
class PreferenceModel:
    """Mean policy evaluation gamma plus the noise distribution G."""

    gamma: float
    g: NoiseCdf

    def __init__(self, gamma: float, g: NoiseCdf):
        object.__setattr__(self, "gamma", float(gamma))
        object.__setattr__(self, "g", g)


# --- scenario --------------------------------------------------------------


@dataclass(frozen=True)
class Scenario:
    electorate: Electorate
    profile: VoteProfile
    rule: PrizeRule
    prizes: PrizeSpec
    prefs: PreferenceModel


def validate(electorate, profile, rule, prizes, prefs) -> list[str]:
    """All invariant violations, each tagged with the offending field path."""
    bad: list[str] = []
    k = electorate.k
    if k < 1:
        bad.append("electorate.group_means: need at least one group")
    for i, n in enumerate(electorate.group_means):
        if not (n > 0) or not math.isfinite(n):
            bad.append(f"electorate.group_means[{i}]: must be finite and > 0, got {n}")
    if len(profile.p) != k:
        bad.append(f"profile.p: length {len(profile.p)} != group count {k}")
    if len(profile.q) != k:
        bad.append(f"profile.q: length {len(profile.q)} != group count {k}")
    for i, (pi, qi) in enumerate(zip(profile.p, profile.q)):
        if not (0.0 <= pi <= 1.0):
            bad.append(f"profile.p[{i}]: must lie in [0, 1], got {pi}")
        if not (0.0 <= qi <= 1.0):
            bad.append(f"profile.q[{i}]: must lie in [0, 1], got {qi}")
        if pi + qi > 1.0:
            bad.append(f"profile.p[{i}] + profile.q[{i}] = {pi + qi} > 1")
    if isinstance(rule, Threshold) and rule.t < 1:
        bad.append(f"rule.params.t: threshold must be >= 1, got {rule.t}")
    if isinstance(rule, Specific):
        stray = sorted(i for i in rule.members if not (0 <= i < k))
        if stray:
            bad.append(f"rule.params.members: indices {stray} outside 0..{k - 1}")
    if isinstance(rule, Proportionate) and rule.rho < 0:
        bad.append(f"rule.params.rho: must be >= 0, got {rule.rho}")
    if prizes.zeta_a < 0:
        bad.append(f"prizes.zeta_A: must be >= 0, got {prizes.zeta_a}")
    if prizes.zeta_b < 0:
        bad.append(f"prizes.zeta_B: must be >= 0, got {prizes.zeta_b}")
    if prizes.rivalry not in (NONRIVAL, RIVAL):
        bad.append(f"prizes.rivalry: must be '{NONRIVAL}' or '{RIVAL}', got {prizes.rivalry!r}")
    if isinstance(prefs.g, Gaussian) and not prefs.g.variance > 0:
        bad.append(f"prefs.G.variance: must be > 0, got {prefs.g.variance}")
    if isinstance(prefs.g, Tabulated):
        xs, us = prefs.g.x, prefs.g.u
        if len(xs) != len(us) or len(xs) < 2:
            bad.append("prefs.G: tabulated cdf needs matching x/u arrays of length >= 2")
        else:
            if any(b <= a for a, b in zip(xs, xs[1:])):
                bad.append("prefs.G.x: knots must be strictly increasing")
            if any(b < a for a, b in zip(us, us[1:])):
                bad.append("prefs.G.u: cdf values must be nondecreasing")
            if us[0] < 0 or us[-1] > 1:
                bad.append("prefs.G.u: cdf values must lie in [0, 1]")
    return bad


def make_scenario(electorate, profile, rule, prizes, prefs) -> Scenario:
    """Validated Scenario; raises ScenarioError listing every violation."""
    bad = validate(electorate, profile, rule, prizes, prefs)
    if bad:
        raise ScenarioError(bad)
    return Scenario(electorate, profile, rule, prizes, prefs)


# --- serialization ---------------------------------------------------------


def _rule_to_json(rule: PrizeRule) -> dict:
    if isinstance(rule, WTA):
        return {"kind": "wta", "params": {}}
    if isinstance(rule, Specific):
        return {"kind": "specific", "params": {"members": sorted(rule.members)}}
    if isinstance(rule, Threshold):
        return {"kind": "threshold", "params": {"t": rule.t}}
    if isinstance(rule, Proportionate):
        return {"kind": "proportionate", "params": {"rho": rule.rho}}
    raise TypeError(f"unknown prize rule {rule!r}")


def _rule_from_json(doc: dict) -> PrizeRule:
    kind = doc.get("kind")
    params = doc.get("params", {})
    if kind == "wta":
        return WTA()
    if kind == "specific":
        return Specific(params["members"])
    if kind == "threshold":
        return Threshold(params["t"])
    if kind == "proportionate":
        return Proportionate(params["rho"])
    raise ScenarioError([f"rule.kind: unknown kind {kind!r}"])


def _g_to_json(g: NoiseCdf) -> dict:
    if isinstance(g, Gaussian):
        return {"kind": "gaussian", "mean": g.mean, "variance": g.variance}
    if isinstance(g, DegenerateAtZero):
        return {"kind": "degenerate"}
    if isinstance(g, Tabulated):
        return {"kind": "tabulated", "x": list(g.x), "u": list(g.u)}
    raise TypeError(f"unknown noise distribution {g!r}")


def _g_from_json(doc: dict) -> NoiseCdf:
    kind = doc.get("kind")
    if kind == "gaussian":
        return Gaussian(doc["mean"], doc["variance"])
    if kind == "degenerate":
        return DegenerateAtZero()
    if kind == "tabulated":
        return Tabulated(doc["x"], doc["u"])
    raise ScenarioError([f"prefs.G.kind: unknown kind {kind!r}"])


def scenario_to_json(s: Scenario) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "electorate": {"group_means": list(s.electorate.group_means)},
        "profile": {"p": list(s.profile.p), "q": list(s.profile.q)},
        "rule": _rule_to_json(s.rule),
        "prizes": {
            "zeta_A": s.prizes.zeta_a,
            "zeta_B": s.prizes.zeta_b,
            "rivalry": s.prizes.rivalry,
        },
        "prefs": {"gamma": s.prefs.gamma, "G": _g_to_json(s.prefs.g)},
    }


def scenario_from_json(doc: dict) -> Scenario:
    try:
        electorate = Electorate(doc["electorate"]["group_means"])
        profile = VoteProfile(doc["profile"]["p"], doc["profile"]["q"])
        rule = _rule_from_json(doc["rule"])
        prizes = PrizeSpec(
            doc["prizes"]["zeta_A"], doc["prizes"]["zeta_B"],
            doc["prizes"].get("rivalry", NONRIVAL),
        )
        prefs = PreferenceModel(doc["prefs"]["gamma"], _g_from_json(doc["prefs"]["G"]))
    except KeyError as exc:
        raise ScenarioError([f"missing required key {exc.args[0]!r}"]) from None
    return make_scenario(electorate, profile, rule, prizes, prefs)


def load_scenario(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return scenario_from_json(json.load(fh))


def save_scenario(s: Scenario, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_json(s), fh, indent=2, sort_keys=True)
        fh.write("\n")


def scenario_hash(s: Scenario) -> str:
    """Stable 8-hex-digit digest of the canonical JSON form."""
    blob = json.dumps(scenario_to_json(s), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:8]
