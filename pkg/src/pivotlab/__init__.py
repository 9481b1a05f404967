"""Pivot probabilities and turnout equilibria for Poisson voting games
with contingent prizes.

Exact Skellam/convolution pivots, Laplace-method asymptotics, Monte
Carlo validation with reproducible per-sample substreams, equilibrium
solvers, and the sweep suite behind the shipped figure presets.
"""

__version__ = "0.1.0"

from .special import (  # noqa: F401
    bessel_i_scaled,
    gaussian_cdf,
    gaussian_pdf,
    gaussian_quantile,
    inverse_mills,
    poisson_cdf,
    poisson_log_pmf,
    poisson_pmf,
    skellam_log_pmf,
    skellam_pmf,
)

from .model import (  # noqa: F401
    DegenerateAtZero,
    Electorate,
    Gaussian,
    PreferenceModel,
    PrizeSpec,
    Proportionate,
    Scenario,
    ScenarioError,
    Specific,
    Tabulated,
    Threshold,
    VoteProfile,
    WTA,
    load_scenario,
    make_scenario,
    save_scenario,
    scenario_from_json,
    scenario_hash,
    scenario_to_json,
)

from .pivots import (  # noqa: F401
    PivotReport,
    outcome_pivot_a,
    outcome_pivot_b,
    pivot_report,
    prize_pivot_proportionate,
    prize_pivot_specific,
    prize_pivot_threshold,
    prize_pivot_wta,
    prize_pivot_wta_k2,
    truncation_cutoff,
    wta_pivot_units,
)

from .asymptotic import (  # noqa: F401
    LaplaceSolution,
    op_approx,
    pivot_report_approx,
    pp_approx,
    pp_laplace,
    pp_lower_bound,
    solve_alpha0,
)

from .montecarlo import (  # noqa: F401
    ElectionSummary,
    McEstimate,
    mc_election,
    mc_outcome_pivot,
    mc_prize_pivot,
)

from .equilibrium import (  # noqa: F401
    EquilibriumResult,
    PrizeOnlyVerdict,
    ThresholdSet,
    best_response,
    solve_dominant_party,
    solve_fixed_point,
    solve_polarized,
    solve_symmetric_competitive,
    thresholds,
    verify_prize_only,
)

from .sweeps import (  # noqa: F401
    Configuration,
    PrizeRequirement,
    SweepTable,
    optimal_group_count,
    proportionate_cost_multiple,
    required_prize,
    sweep_fig1,
    sweep_fig2,
    sweep_fig3,
    sweep_fig4,
    sweep_fig5,
    sweep_fig6,
    sweep_fig7,
    total_cost,
)
