"""Command-line interface: pivots, solvers, MC validation, figure sweeps.

Exit codes: 0 success, 1 domain error (bad flags, unreadable or invalid
scenario, violated preconditions), 2 numeric failure (solver did not
converge, or the validation grid found an exact/MC disagreement).
Domain errors are raised before any output file is written, so a
failing sweep never leaves a partial table behind.

All JSON payloads carry schema_version 1.  Non-finite floats are not
representable in strict JSON and are emitted as the strings "inf",
"-inf", and "nan".
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace

import numpy as np

from .asymptotic import pivot_report_approx
from .equilibrium import (
    solve_dominant_party,
    solve_fixed_point,
    solve_polarized,
    solve_symmetric_competitive,
    verify_prize_only,
)
from .model import (
    Electorate,
    ScenarioError,
    VoteProfile,
    WTA,
    load_scenario,
    scenario_hash,
)
from .montecarlo import mc_outcome_pivot, mc_prize_pivot
from .pivots import outcome_pivot_a, pivot_report, wta_pivot_units
from .sweeps import (
    sweep_fig1,
    sweep_fig2,
    sweep_fig3,
    sweep_fig4,
    sweep_fig5,
    sweep_fig6,
    sweep_fig7,
)

__all__ = ["main"]

SCHEMA_VERSION = 1

INIT_PRESETS = {
    "uniform": (0.25, 0.25),
    "apathy": (0.01, 0.01),
    "a-lean": (0.40, 0.10),
    "b-lean": (0.10, 0.40),
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; the contract wants usage text and exit 1
    def error(self, message):
        raise _UsageError(message)


def _json_safe(value):
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, dict):
        return {key: _json_safe(v) for key, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def _emit(doc: dict) -> None:
    doc = {"schema_version": SCHEMA_VERSION, **doc}
    print(json.dumps(_json_safe(doc), indent=2))


# --- pivot -----------------------------------------------------------------------


def _estimate_dict(est) -> dict:
    return {"mean": est.mean, "std_error": est.std_error}


def _mc_pivot_doc(scenario, args) -> dict:
    profile, electorate = scenario.profile, scenario.electorate
    swapped = VoteProfile(profile.q, profile.p)
    op_a = mc_outcome_pivot(profile, electorate, args.samples, args.seed)
    op_b = mc_outcome_pivot(swapped, electorate, args.samples, args.seed)
    groups = range(electorate.k) if args.group is None else [args.group]
    if args.group is not None and not 0 <= args.group < electorate.k:
        raise ValueError(f"--group must lie in [0, {electorate.k}), got {args.group}")
    pp_a = [None] * electorate.k
    pp_b = [None] * electorate.k
    for k in groups:
        pp_a[k] = _estimate_dict(mc_prize_pivot(
            k, profile, electorate, scenario.rule, scenario.prizes.zeta_a,
            args.convention, args.samples, args.seed, party="A"))
        pp_b[k] = _estimate_dict(mc_prize_pivot(
            k, profile, electorate, scenario.rule, scenario.prizes.zeta_b,
            args.convention, args.samples, args.seed, party="B"))
    return {
        "op_A": _estimate_dict(op_a),
        "op_B": {"mean": -op_b.mean, "std_error": op_b.std_error},
        "pp_A": pp_a,
        "pp_B": pp_b,
        "method": "mc",
        "convention": args.convention,
        "samples": args.samples,
        "seed": args.seed,
    }


def _cmd_pivot(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.method == "mc":
        if args.seed is None:
            raise ValueError("--seed is required with --method mc")
        doc = _mc_pivot_doc(scenario, args)
    else:
        if args.group is not None:
            raise ValueError("--group applies only to --method mc")
        if args.method == "exact":
            doc = pivot_report(scenario, convention=args.convention).as_json_dict()
        else:
            doc = pivot_report_approx(scenario).as_json_dict()
    doc["scenario"] = scenario_hash(scenario)
    _emit(doc)
    return 0


# --- solve -----------------------------------------------------------------------


def _symmetric_inputs(scenario):
    prizes = scenario.prizes
    if prizes.zeta_a != prizes.zeta_b:
        raise ValueError("symmetric family needs equal prizes for both parties")
    return (scenario.electorate.n_total, scenario.electorate.k, prizes.zeta_a,
            scenario.prefs.g)


def _polarized_sides(scenario) -> tuple:
    """Read each group's side off the scenario profile's support pattern."""
    p = np.asarray(scenario.profile.p)
    q = np.asarray(scenario.profile.q)
    side_a = (p > 0) & (q == 0)
    side_b = (q > 0) & (p == 0)
    if not np.all(side_a | side_b):
        raise ValueError(
            "polarized family needs every group supporting exactly one party "
            "in the scenario profile")
    k_a = int(side_a.sum())
    if not np.array_equal(side_a, np.arange(len(p)) < k_a):
        raise ValueError("polarized family lists party-A groups first")
    return k_a, int(side_b.sum())


def _cmd_solve(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.family == "fixed-point":
        start = INIT_PRESETS[args.init]
        k = scenario.electorate.k
        initial = VoteProfile((start[0],) * k, (start[1],) * k)
        result = solve_fixed_point(scenario, args.c, initial=initial,
                                   damping=args.damping, tol=args.tol)
    elif args.family == "symmetric":
        n_t, k, zeta, noise = _symmetric_inputs(scenario)
        result = solve_symmetric_competitive(n_t, k, zeta, args.c, noise)
    elif args.family == "dominant":
        result = solve_dominant_party(
            scenario.electorate.n_total, scenario.electorate.k,
            scenario.prizes.zeta_a, scenario.prizes.zeta_b, args.c)
    elif args.family == "polarized":
        k_a, k_b = _polarized_sides(scenario)
        result = solve_polarized(
            scenario.electorate.n_total, k_a, k_b,
            scenario.prizes.zeta_a, scenario.prizes.zeta_b, args.c)
    else:  # prize-only-verify
        verdict = verify_prize_only(scenario.profile, scenario, args.c)
        _emit({
            "family": args.family,
            "scenario": scenario_hash(scenario),
            "conditions": {name: getattr(verdict, name) for name in (
                "support_exists", "common_peak", "interior_indifference",
                "abstention_unprofitable")},
            "ok": verdict.ok,
            "failed": list(verdict.failed),
        })
        return 0

    doc = result.as_json_dict()
    doc["family"] = args.family
    doc["scenario"] = scenario_hash(scenario)
    _emit(doc)
    if result.tag == "oscillating":
        print(f"error: solver did not converge after {result.iterations} "
              f"iterations (residual {result.residual:.3e})", file=sys.stderr)
        return 2
    return 0


# --- sweep -----------------------------------------------------------------------

# flag -> keyword argument, per figure; anything else is a domain error
_SWEEP_FNS = {1: sweep_fig1, 2: sweep_fig2, 3: sweep_fig3, 4: sweep_fig4,
              5: sweep_fig5, 6: sweep_fig6, 7: sweep_fig7}
_SWEEP_OVERRIDES = {
    1: {"p": "p"},
    2: {"n_t": "n_t", "q": "q", "k": "k"},
    3: {"n_t": "n_t", "k": "k", "c": "c"},
    4: {"n_t": "n_t", "k": "k", "zeta_a": "zeta_a", "zeta_b": "zeta_b"},
    5: {"n_t": "n_t", "ka": "k_a", "kb": "k_b", "zeta_a": "zeta_a",
        "zeta_b": "zeta_b"},
    6: {"n_t": "n_t", "p_star": "p_star", "c": "c"},
    7: {"n_t": "n_t", "p_star": "p_star", "c": "c"},
}
_SWEEP_FLAGS = ("n_t", "p", "q", "k", "c", "zeta_a", "zeta_b", "ka", "kb",
                "p_star")


def _cmd_sweep(args) -> int:
    allowed = _SWEEP_OVERRIDES[args.figure]
    kwargs = {}
    for flag in _SWEEP_FLAGS:
        value = getattr(args, flag)
        if value is None:
            continue
        if flag not in allowed:
            raise ValueError(f"--{flag.replace('_', '-')} does not apply to "
                             f"figure {args.figure}")
        kwargs[allowed[flag]] = int(value) if flag in ("k", "ka", "kb") else value
    table = _SWEEP_FNS[args.figure](**kwargs)
    path = table.write(args.out, args.format)
    _emit({
        "figure": args.figure,
        "path": str(path),
        "hash": table.param_hash,
        "rows": len(table.rows),
        "columns": list(table.columns),
    })
    return 0


# --- validate --------------------------------------------------------------------


def _cmd_validate(args) -> int:
    # 4 SE keeps the chance of a spurious failure across the grid ~1e-3
    k_values = (2, 3, 5, 9)
    lam_values = (0.5, 2.0, 10.0, 50.0)
    lines = []
    worst = 0.0
    failures = 0

    for lam in lam_values:
        electorate = Electorate([100.0, 100.0])
        profile = VoteProfile((lam / 100.0,) * 2, (lam / 100.0,) * 2)
        exact = outcome_pivot_a(profile, electorate)
        est = mc_outcome_pivot(profile, electorate, args.samples, args.seed)
        z = abs(est.mean - exact) / est.std_error if est.std_error else 0.0
        worst = max(worst, z)
        ok = z <= 4.0
        failures += not ok
        lines.append(f"{'PASS' if ok else 'FAIL'} outcome lam={lam:<5g} "
                     f"exact={exact:.6e} mc={est.mean:.6e} "
                     f"se={est.std_error:.2e} |z|={z:.2f}")

    for k in k_values:
        for lam in lam_values:
            rates = np.full(k, lam)
            electorate = Electorate([100.0] * k)
            profile = VoteProfile((lam / 100.0,) * k, (0.0,) * k)
            for convention in ("strict", "lenient"):
                units, _ = wta_pivot_units(rates, convention)
                exact = float(units[0])
                est = mc_prize_pivot(0, profile, electorate, WTA(), 1.0,
                                     convention, args.samples, args.seed)
                z = abs(est.mean - exact) / est.std_error if est.std_error else 0.0
                worst = max(worst, z)
                ok = z <= 4.0
                failures += not ok
                lines.append(f"{'PASS' if ok else 'FAIL'} prize k={k} "
                             f"lam={lam:<5g} conv={convention:<7s} "
                             f"exact={exact:.6e} mc={est.mean:.6e} "
                             f"se={est.std_error:.2e} |z|={z:.2f}")

    print("\n".join(lines))
    print(f"{len(lines) - failures}/{len(lines)} cells within 4 SE "
          f"(worst |z|={worst:.2f}, samples={args.samples}, seed={args.seed})")
    return 0 if failures == 0 else 2


# --- parser ----------------------------------------------------------------------


def _build_parser() -> _Parser:
    parser = _Parser(prog="pivotlab",
                     description="Pivot probabilities and turnout equilibria "
                                 "in Poisson voting games with prizes.")
    sub = parser.add_subparsers(dest="command", required=True)

    pivot = sub.add_parser("pivot", help="print a pivot report for a scenario")
    pivot.add_argument("--scenario", required=True)
    pivot.add_argument("--method", choices=("exact", "approx", "mc"),
                       default="exact")
    pivot.add_argument("--group", type=int, default=None,
                       help="restrict MC prize pivots to one group index")
    pivot.add_argument("--samples", type=int, default=100_000)
    pivot.add_argument("--seed", type=int, default=None)
    pivot.add_argument("--convention", choices=("strict", "lenient"),
                       default="strict")

    solve = sub.add_parser("solve", help="solve for an equilibrium")
    solve.add_argument("--scenario", required=True)
    solve.add_argument("--family", required=True,
                       choices=("fixed-point", "symmetric", "dominant",
                                "polarized", "prize-only-verify"))
    solve.add_argument("--c", type=float, required=True,
                       help="cost of voting")
    solve.add_argument("--damping", type=float, default=0.3)
    solve.add_argument("--tol", type=float, default=1e-10)
    solve.add_argument("--init", choices=sorted(INIT_PRESETS), default="uniform",
                       help="starting profile preset for fixed-point")

    sweep = sub.add_parser("sweep", help="write a figure's sweep table")
    sweep.add_argument("--figure", type=int, required=True,
                       choices=tuple(_SWEEP_FNS))
    sweep.add_argument("--out", default=".")
    sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    sweep.add_argument("--n-t", dest="n_t", type=float, default=None)
    sweep.add_argument("--p", type=float, default=None)
    sweep.add_argument("--q", type=float, default=None)
    sweep.add_argument("--k", type=float, default=None)
    sweep.add_argument("--c", type=float, default=None)
    sweep.add_argument("--zeta-a", dest="zeta_a", type=float, default=None)
    sweep.add_argument("--zeta-b", dest="zeta_b", type=float, default=None)
    sweep.add_argument("--ka", type=float, default=None)
    sweep.add_argument("--kb", type=float, default=None)
    sweep.add_argument("--p-star", dest="p_star", type=float, default=None)

    validate = sub.add_parser("validate",
                              help="exact vs Monte Carlo agreement grid")
    validate.add_argument("--samples", type=int, default=200_000)
    validate.add_argument("--seed", type=int, required=True)

    return parser


_COMMANDS = {"pivot": _cmd_pivot, "solve": _cmd_solve, "sweep": _cmd_sweep,
             "validate": _cmd_validate}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as err:
        parser.print_usage(sys.stderr)
        print(f"error: {err}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except (ScenarioError, ValueError, TypeError, OSError,
            json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
