"""Inference models producing horizon-scaled covariance forecasts."""

from cryptovar.models.dcc import (
    DccParams,
    dcc_forecast_covariance,
    fit_dcc,
    fit_dcc_garch,
)
from cryptovar.models.ewma import (
    EwmaParams,
    ewma_covariance_matrix,
    ewma_forecast,
)
from cryptovar.models.garch import (
    GAUSSIAN,
    STUDENT_T,
    GarchParams,
    conditional_volatility,
    fit_garch11,
    simulate_garch11,
)
from cryptovar.models.har import (
    HarFit,
    fit_har_corr,
    fit_lharq,
    forecast_har_corr,
    forecast_lharq,
    har_forecast_covariance,
)
from cryptovar.models.ols import OlsFit, ols_solve
from cryptovar.models.psd import CovarianceForecast, ensure_psd

__all__ = [
    "CovarianceForecast",
    "DccParams",
    "EwmaParams",
    "GAUSSIAN",
    "GarchParams",
    "HarFit",
    "OlsFit",
    "STUDENT_T",
    "conditional_volatility",
    "dcc_forecast_covariance",
    "ensure_psd",
    "ewma_covariance_matrix",
    "ewma_forecast",
    "fit_dcc",
    "fit_dcc_garch",
    "fit_garch11",
    "fit_har_corr",
    "fit_lharq",
    "forecast_har_corr",
    "forecast_lharq",
    "har_forecast_covariance",
    "ols_solve",
    "simulate_garch11",
]
