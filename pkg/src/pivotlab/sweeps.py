"""Parameter sweeps over the pivot and equilibrium machinery.

Each sweep returns a SweepTable: an ordered, fully populated grid of
inputs and outputs plus enough provenance (parameter hash and package
version) to reproduce the file bit-for-bit.  Tables serialize to CSV
(one header row, one row per grid point) and JSON (table plus
provenance block); files are named {name}_{hash}.{ext} so distinct
parameterizations never collide.

The group-configuration analysis prices prizes for a dominant party:
required_prize inverts the prize pivot at a target support level, and
total_cost converts it into spending for a non-rival prize (one prize
per competition) or a rival one (every member of the winning group is
paid, so the per-competition cost scales with group size).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from . import __version__
from .asymptotic import op_approx, pp_approx
from .equilibrium import (
    RATE_SWITCH,
    solve_dominant_party,
    solve_polarized,
    solve_symmetric_competitive,
)
from .model import Gaussian, NONRIVAL, RIVAL
from .pivots import wta_pivot_units

__all__ = [
    "Configuration",
    "SweepTable",
    "PrizeRequirement",
    "sweep_fig1",
    "sweep_fig2",
    "sweep_fig3",
    "sweep_fig4",
    "sweep_fig5",
    "sweep_fig6",
    "sweep_fig7",
    "required_prize",
    "total_cost",
    "optimal_group_count",
    "proportionate_cost_multiple",
]

Cell = Union[int, float, str, bool]


@dataclass(frozen=True)
class Configuration:
    """A prize-competition layout: C parallel competitions of G groups each."""

    competitions: int
    groups_per_competition: int
    total_population: float
    target_support: float
    cost_of_voting: float
    rivalry: str = NONRIVAL

    def __post_init__(self):
        if self.competitions < 1:
            raise ValueError(f"competitions must be >= 1, got {self.competitions}")
        if self.groups_per_competition < 2:
            raise ValueError(
                f"a competition needs at least two groups, got {self.groups_per_competition}")
        if not self.total_population > 0:
            raise ValueError(f"total_population must be positive, got {self.total_population}")
        if not 0.0 < self.target_support <= 1.0:
            raise ValueError(f"target_support must lie in (0, 1], got {self.target_support}")
        if self.rivalry not in (NONRIVAL, RIVAL):
            raise ValueError(f"rivalry must be '{NONRIVAL}' or '{RIVAL}', got {self.rivalry!r}")

    @property
    def group_size(self) -> float:
        return self.total_population / (self.competitions * self.groups_per_competition)


@dataclass(frozen=True)
class SweepTable:
    """An ordered sweep result with column metadata and provenance."""

    name: str
    columns: Tuple[str, ...]
    rows: Tuple[Tuple[Cell, ...], ...]
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(f"row width {len(row)} != column count {len(self.columns)}")

    @property
    def param_hash(self) -> str:
        payload = json.dumps({"name": self.name, "params": self.params},
                             sort_keys=True, default=str)
        return hashlib.sha256(payload.encode()).hexdigest()[:8]

    @property
    def file_stem(self) -> str:
        return f"{self.name}_{self.param_hash}"

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(repr(v) if isinstance(v, float) else str(v)
                                  for v in row))
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "schema_version": 1,
            "name": self.name,
            "columns": list(self.columns),
            "rows": [list(row) for row in self.rows],
            "params": self.params,
            "provenance": {"hash": self.param_hash, "version": __version__},
        }

    def write(self, out_dir, fmt: str = "csv") -> Path:
        if fmt not in ("csv", "json"):
            raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
        out = Path(out_dir) / f"{self.file_stem}.{fmt}"
        out.parent.mkdir(parents=True, exist_ok=True)
        if fmt == "csv":
            out.write_text(self.to_csv())
        else:
            out.write_text(json.dumps(self.to_json_dict(), indent=2) + "\n")
        return out


# --- pivot accuracy sweeps -------------------------------------------------------


def _unit_pivot_exact(lam: float, k: int) -> float:
    units, _ = wta_pivot_units(np.full(k, lam), "lenient")
    return float(units[0])


def sweep_fig1(k_values: Sequence[int] = (3, 9),
               group_sizes: Sequence[float] = (40.0, 400.0, 4000.0, 40000.0),
               p: float = 0.3) -> SweepTable:
    """Exact vs asymptotic prize pivot across group counts and sizes."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    rows = []
    for k in sorted(k_values):
        for n in sorted(group_sizes):
            if n <= 0:
                raise ValueError(f"group sizes must be positive, got {n}")
            exact = _unit_pivot_exact(n * p, k)
            approx = pp_approx(p, n, k, 1.0)
            rows.append((int(k), float(n), exact, approx,
                         abs(approx - exact) / exact))
    return SweepTable(
        name="fig1",
        columns=("k", "group_size", "pp_exact", "pp_approx", "rel_error"),
        rows=tuple(rows),
        params={"k_values": sorted(int(k) for k in k_values),
                "group_sizes": sorted(float(n) for n in group_sizes), "p": p},
    )


def sweep_fig2(n_t: float = 100_000.0, q: float = 0.3, k: int = 3,
               p_grid: Optional[Sequence[float]] = None) -> SweepTable:
    """Outcome and prize pivot approximations across the support grid."""
    if p_grid is None:
        p_grid = [round(0.01 * i, 2) for i in range(1, 61)]
    n_group = n_t / k
    rows = []
    for p in sorted(p_grid):
        rows.append((float(p), op_approx(p, q, n_t), pp_approx(p, n_group, k, 1.0)))
    return SweepTable(
        name="fig2",
        columns=("p", "op_approx", "pp_approx"),
        rows=tuple(rows),
        params={"n_t": n_t, "q": q, "k": k, "p_grid": [float(p) for p in sorted(p_grid)]},
    )


# --- equilibrium sweeps ------------------------------------------------------------


def sweep_fig3(zeta_grid: Sequence[float] = tuple(range(0, 401, 25)),
               n_t: float = 100_000.0, k: int = 3, c: float = 1.0,
               noise_variance: float = 100.0) -> SweepTable:
    """Symmetric-competitive turnout as the prize grows."""
    noise = Gaussian(0.0, noise_variance)
    rows = []
    for zeta in sorted(zeta_grid):
        res = solve_symmetric_competitive(n_t, k, float(zeta), c, noise)
        rows.append((float(zeta), res.profile.p[0], res.votes_a, res.turnout,
                     res.tag, res.pivot_method))
    return SweepTable(
        name="fig3",
        columns=("zeta", "p", "votes_per_party", "turnout", "tag", "pivot_method"),
        rows=tuple(rows),
        params={"zeta_grid": [float(z) for z in sorted(zeta_grid)], "n_t": n_t,
                "k": k, "c": c, "noise_variance": noise_variance},
    )


def _c_grid_default() -> Tuple[float, ...]:
    return tuple(round(0.1 * i, 1) for i in range(1, 21))


def sweep_fig4(c_grid: Optional[Sequence[float]] = None, n_t: float = 100_000.0,
               k: int = 3, zeta_a: float = 300.0, zeta_b: float = 100.0) -> SweepTable:
    """Dominant-party support as the cost of voting grows."""
    c_grid = _c_grid_default() if c_grid is None else c_grid
    rows = []
    for c in sorted(c_grid):
        res = solve_dominant_party(n_t, k, zeta_a, zeta_b, float(c))
        rows.append((float(c), res.profile.p[0], res.profile.q[0],
                     res.votes_a, res.votes_b, res.tag))
    return SweepTable(
        name="fig4",
        columns=("c", "p", "q", "votes_a", "votes_b", "tag"),
        rows=tuple(rows),
        params={"c_grid": [float(c) for c in sorted(c_grid)], "n_t": n_t, "k": k,
                "zeta_a": zeta_a, "zeta_b": zeta_b},
    )


def sweep_fig5(c_grid: Optional[Sequence[float]] = None, k_a: int = 3, k_b: int = 6,
               n_t: float = 100_000.0, zeta_a: float = 300.0,
               zeta_b: float = 100.0) -> SweepTable:
    """Polarized-group turnout and the A-dominance condition across costs."""
    c_grid = _c_grid_default() if c_grid is None else c_grid
    rows = []
    for c in sorted(c_grid):
        res = solve_polarized(n_t, k_a, k_b, zeta_a, zeta_b, float(c))
        rows.append((float(c), res.profile.p[0], res.profile.q[-1],
                     res.votes_a, res.votes_b,
                     "dominance-violated" not in res.flags, res.tag))
    return SweepTable(
        name="fig5",
        columns=("c", "p", "q", "votes_a", "votes_b", "a_dominant", "tag"),
        rows=tuple(rows),
        params={"c_grid": [float(c) for c in sorted(c_grid)], "k_a": k_a, "k_b": k_b,
                "n_t": n_t, "zeta_a": zeta_a, "zeta_b": zeta_b},
    )


# --- group-configuration cost analysis ----------------------------------------------


@dataclass(frozen=True)
class PrizeRequirement:
    """The prize that makes the target support an equilibrium, with context."""

    zeta_star: float
    unit_pivot: float
    method: str  # exact | asymptotic


def required_prize(config: Configuration) -> PrizeRequirement:
    """Prize needed for the group pivot to cover the voting cost at p*.

    The pivot is linear in the prize, so zeta* = c / Psi with Psi the
    unit-prize pivot among the competition's G groups at rate n p*.
    Exact below RATE_SWITCH, asymptotic above, like the family solvers.
    """
    n = config.group_size
    g = config.groups_per_competition
    lam = n * config.target_support
    if lam < RATE_SWITCH:
        psi = _unit_pivot_exact(lam, g)
        method = "exact"
    else:
        psi = pp_approx(config.target_support, n, g, 1.0)
        method = "asymptotic"
    return PrizeRequirement(zeta_star=config.cost_of_voting / psi,
                            unit_pivot=psi, method=method)


def total_cost(config: Configuration, zeta_star: float) -> float:
    """Party spending to fund the prize in every competition.

    Non-rival: one prize per competition, C * zeta.  Rival: every member
    of each winning group is paid, C * zeta * n = zeta * n_T / G.
    """
    if config.rivalry == NONRIVAL:
        return config.competitions * zeta_star
    return zeta_star * config.total_population / config.groups_per_competition


def sweep_fig6(n_t: float = 100_000.0, p_star: float = 0.6, c: float = 1.0,
               k_range: Sequence[int] = tuple(range(2, 28)),
               competition_counts: Sequence[int] = (1, 3)) -> SweepTable:
    """Non-rival prize cost across group counts and competition counts."""
    rows = []
    for k in sorted(k_range):
        row: list = [int(k)]
        for comps in competition_counts:
            config = Configuration(comps, int(k), n_t, p_star, c, NONRIVAL)
            req = required_prize(config)
            row.extend([req.zeta_star, total_cost(config, req.zeta_star), req.method])
        rows.append(tuple(row))
    columns: Tuple[str, ...] = ("k",)
    for comps in competition_counts:
        columns += (f"zeta_star_c{comps}", f"cost_c{comps}", f"method_c{comps}")
    return SweepTable(
        name="fig6", columns=columns, rows=tuple(rows),
        params={"n_t": n_t, "p_star": p_star, "c": c,
                "k_range": [int(k) for k in sorted(k_range)],
                "competition_counts": [int(x) for x in competition_counts]},
    )


def sweep_fig7(n_t: float = 100_000.0, p_star: float = 0.6, c: float = 1.0,
               configs: Sequence[Tuple[int, int]] = ((1, 3), (1, 9), (3, 3),
                                                     (3, 9), (9, 9))) -> SweepTable:
    """Rival prize cost across (competitions, groups) layouts."""
    rows = []
    for comps, groups in configs:
        config = Configuration(comps, groups, n_t, p_star, c, RIVAL)
        req = required_prize(config)
        rows.append((int(comps), int(groups), config.group_size, req.zeta_star,
                     total_cost(config, req.zeta_star), req.method))
    return SweepTable(
        name="fig7",
        columns=("competitions", "groups", "group_size", "zeta_star", "cost", "method"),
        rows=tuple(rows),
        params={"n_t": n_t, "p_star": p_star, "c": c,
                "configs": [[int(a), int(b)] for a, b in configs]},
    )


def optimal_group_count(n_t: float, p_star: float, c: float,
                        k_range: Sequence[int] = tuple(range(2, 28)),
                        rivalry: str = NONRIVAL) -> Union[int, SweepTable]:
    """Cheapest layout for the prize budget.

    Non-rival prizes: returns the group count minimizing the required
    prize in a single competition.  Rival prizes: no single optimum is
    meaningful (cost falls in both the competition count and the group
    count), so the cost-ordering table is returned instead.
    """
    if rivalry == RIVAL:
        return sweep_fig7(n_t, p_star, c)
    table = sweep_fig6(n_t, p_star, c, k_range, competition_counts=(1,))
    costs = table.column("cost_c1")
    return int(table.column("k")[costs.index(min(costs))])


def proportionate_cost_multiple(n_t: float = 100_000.0, k: int = 3,
                                zeta: float = 400.0, c: float = 1.0,
                                noise_variance: float = 100.0) -> float:
    """Cost of buying WTA-prize turnout with a per-vote payment instead.

    Under the proportionate rule each vote must be worth the voting cost
    to move anyone, so matching the winner-take-all equilibrium turnout
    costs c * p * n_T per party; this returns that spend as a multiple
    of the winner-take-all prize.
    """
    res = solve_symmetric_competitive(n_t, k, zeta, c, Gaussian(0.0, noise_variance))
    return c * res.votes_a / zeta
