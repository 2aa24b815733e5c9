"""Violation construction and statistical validation of VaR forecasts."""

from cryptovar.backtest.campaign import (
    CampaignConfig,
    CampaignResult,
    expost_realized_covariance,
    load_config,
    run_backtest_campaign,
)
from cryptovar.backtest.distributions import (
    binomial_sf,
    chi2_sf_1df,
    f_sf,
    regularized_incomplete_beta,
)
from cryptovar.backtest.stats import (
    TestReport,
    binomial_coverage,
    christoffersen_lr,
    regression_independence_f,
    transition_counts,
    weighted_average_statistic,
)
from cryptovar.backtest.violations import (
    ViolationSeries,
    build_violations,
    realized_return,
    split_groups,
)

__all__ = [
    "CampaignConfig",
    "CampaignResult",
    "TestReport",
    "ViolationSeries",
    "binomial_coverage",
    "binomial_sf",
    "build_violations",
    "chi2_sf_1df",
    "christoffersen_lr",
    "expost_realized_covariance",
    "f_sf",
    "load_config",
    "realized_return",
    "regression_independence_f",
    "regularized_incomplete_beta",
    "run_backtest_campaign",
    "split_groups",
    "transition_counts",
    "weighted_average_statistic",
]
