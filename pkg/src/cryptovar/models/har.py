"""HAR-DRD covariance forecasting from half-day realized measures.

The covariance matrix is decomposed into a variance diagonal and a
correlation matrix. Log-variances follow a leverage + quarticity HAR
regression (12-hour horizon, heterogeneous averages over 2 and 5 days);
correlations follow an untransformed HAR regression with an out-of-range
fallback to the trailing 5-day average. Both are fitted by OLS on every
forecast call.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from cryptovar.errors import (
    DegenerateCorrelationError,
    InsufficientDataError,
)
from cryptovar.marketdata.bars import MINUTE_MS, ReturnSeries, align_series, log_returns
from cryptovar.marketdata.realized import (
    realized_quarticity,
    realized_variance,
)
from cryptovar.models.ols import OlsFit, ols_solve
from cryptovar.models.psd import CovarianceForecast, ensure_psd

logger = logging.getLogger(__name__)

HALF_DAY_MINUTES = 720
HALF_DAYS_PER_DAY = 2
RETURN_INTERVAL_MINUTES = 5
LOOKBACK_DAYS = 15

# heterogeneous averaging windows, in half-day periods
SHORT_AVG_PERIODS = 4   # 2 days
LONG_AVG_PERIODS = 10   # 5 days

_VARIANCE_REGRESSORS = 6
_CORRELATION_REGRESSORS = 4
_MIN_EXTRA_ROWS = 5


@dataclass(frozen=True)
class HalfDayMeasures:
    """Chronological per-window realized measures for one symbol."""

    sym: str
    end_times: np.ndarray
    rv: np.ndarray       # NaN where the window was incomplete
    rq: np.ndarray
    period_return: np.ndarray


@dataclass(frozen=True)
class HarFit:
    """OLS fit of one HAR equation plus the row count it was fitted on."""

    ols: OlsFit
    n_rows: int

    @property
    def beta(self) -> np.ndarray:
        return self.ols.beta


def _constant_fit(y: np.ndarray, k: int) -> OlsFit:
    # constant response: the exact least-squares solution puts everything
    # on the intercept, which a rank check would otherwise reject
    beta = np.zeros(k)
    beta[0] = float(np.mean(y))
    return OlsFit(beta=beta, se=np.zeros(k), r2=1.0, resid_var=0.0, cond=math.inf, n=len(y))


def _is_constant(y: np.ndarray) -> bool:
    return len(y) > 0 and float(np.ptp(y)) <= 1e-12 * max(1.0, float(np.abs(y).max()))


def _trailing_log_mean(rv: np.ndarray, t: int, periods: int) -> float:
    window = rv[t - periods + 1 : t + 1]
    mean = float(np.mean(window))
    return math.log(mean) if mean > 0 else math.nan


def _lharq_row(rv: np.ndarray, ret: np.ndarray, rq: np.ndarray, t: int) -> np.ndarray:
    if not (rv[t] > 0 and rq[t] > 0):
        return np.full(_VARIANCE_REGRESSORS, np.nan)
    return np.array(
        [
            1.0,
            min(ret[t], 0.0),
            math.log(rv[t]),
            math.log(math.sqrt(rq[t]) * rv[t]),
            _trailing_log_mean(rv, t, SHORT_AVG_PERIODS),
            _trailing_log_mean(rv, t, LONG_AVG_PERIODS),
        ]
    )


def fit_lharq(rv: np.ndarray, ret: np.ndarray, rq: np.ndarray) -> HarFit:
    """Fit the log-variance HAR equation with leverage and quarticity terms.

    ``rv``, ``ret`` and ``rq`` are chronological half-day series; rows with
    non-positive RV/RQ anywhere in their regressor window are dropped.
    """
    rv, ret, rq = (np.asarray(a, dtype=float) for a in (rv, ret, rq))
    n = len(rv)
    rows, targets = [], []
    for t in range(LONG_AVG_PERIODS - 1, n - 1):
        if not rv[t + 1] > 0:
            continue
        row = _lharq_row(rv, ret, rq, t)
        if np.all(np.isfinite(row)):
            rows.append(row)
            targets.append(math.log(rv[t + 1]))
    if len(rows) < _VARIANCE_REGRESSORS + _MIN_EXTRA_ROWS:
        raise InsufficientDataError(
            f"LHARQ fit needs >= {_VARIANCE_REGRESSORS + _MIN_EXTRA_ROWS} usable rows, got {len(rows)}"
        )
    X = np.array(rows)
    y = np.array(targets)
    if _is_constant(y):
        return HarFit(ols=_constant_fit(y, _VARIANCE_REGRESSORS), n_rows=len(y))
    return HarFit(ols=ols_solve(X, y), n_rows=len(y))


def forecast_lharq(fit: HarFit, rv: np.ndarray, ret: np.ndarray, rq: np.ndarray) -> float:
    """One-step-ahead half-day log-variance from the latest regressor row."""
    rv, ret, rq = (np.asarray(a, dtype=float) for a in (rv, ret, rq))
    row = _lharq_row(rv, ret, rq, len(rv) - 1)
    if not np.all(np.isfinite(row)):
        raise InsufficientDataError("latest half-day window unusable for forecasting")
    return float(row @ fit.beta)


def _corr_row(rcorr: np.ndarray, t: int) -> np.ndarray:
    return np.array(
        [
            1.0,
            rcorr[t],
            float(np.mean(rcorr[t - SHORT_AVG_PERIODS + 1 : t + 1])),
            float(np.mean(rcorr[t - LONG_AVG_PERIODS + 1 : t + 1])),
        ]
    )


def fit_har_corr(rcorr: np.ndarray) -> HarFit:
    """Fit the untransformed HAR equation on a half-day correlation series."""
    rcorr = np.asarray(rcorr, dtype=float)
    n = len(rcorr)
    rows, targets = [], []
    for t in range(LONG_AVG_PERIODS - 1, n - 1):
        row = _corr_row(rcorr, t)
        if np.all(np.isfinite(row)) and np.isfinite(rcorr[t + 1]):
            rows.append(row)
            targets.append(rcorr[t + 1])
    if len(rows) < _CORRELATION_REGRESSORS + _MIN_EXTRA_ROWS:
        raise InsufficientDataError(
            f"HAR correlation fit needs >= {_CORRELATION_REGRESSORS + _MIN_EXTRA_ROWS} usable rows, got {len(rows)}"
        )
    X = np.array(rows)
    y = np.array(targets)
    if _is_constant(y):
        return HarFit(ols=_constant_fit(y, _CORRELATION_REGRESSORS), n_rows=len(y))
    return HarFit(ols=ols_solve(X, y), n_rows=len(y))


def forecast_har_corr(fit: HarFit, rcorr: np.ndarray) -> float:
    rcorr = np.asarray(rcorr, dtype=float)
    row = _corr_row(rcorr, len(rcorr) - 1)
    if not np.all(np.isfinite(row)):
        raise InsufficientDataError("latest correlation window unusable for forecasting")
    return float(row @ fit.beta)


def _window_slices(timestamps: np.ndarray, now_ms: int, n_windows: int) -> list[slice]:
    edges = np.array(
        [now_ms - (n_windows - k) * HALF_DAY_MINUTES * MINUTE_MS for k in range(n_windows + 1)],
        dtype=np.int64,
    )
    # window w covers [edges[w], edges[w+1]); a return stamped exactly at
    # `now` cannot exist yet (its minute bar has only just opened), so the
    # trailing window ends one grid step earlier
    left = np.searchsorted(timestamps, edges[:-1], side="left")
    right = np.searchsorted(timestamps, edges[1:], side="left")
    return [slice(int(l), int(r)) for l, r in zip(left, right)]


def half_day_measures(
    returns: ReturnSeries, now_ms: int, n_windows: int
) -> HalfDayMeasures:
    """Realized measures over trailing half-day windows anchored at now."""
    rv = np.full(n_windows, np.nan)
    rq = np.full(n_windows, np.nan)
    ret = np.full(n_windows, np.nan)
    ends = np.array(
        [now_ms - (n_windows - 1 - w) * HALF_DAY_MINUTES * MINUTE_MS for w in range(n_windows)],
        dtype=np.int64,
    )
    for w, sl in enumerate(_window_slices(returns.timestamps, now_ms, n_windows)):
        sub = ReturnSeries(
            returns.sym,
            returns.interval_minutes,
            returns.timestamps[sl],
            returns.values[sl],
        )
        try:
            rv[w] = realized_variance(sub, HALF_DAY_MINUTES)
            rq[w] = realized_quarticity(sub, HALF_DAY_MINUTES)
        except InsufficientDataError:
            continue
        ret[w] = float(np.sum(sub.values))
    return HalfDayMeasures(sym=returns.sym, end_times=ends, rv=rv, rq=rq, period_return=ret)


def half_day_correlations(
    r1: ReturnSeries, r2: ReturnSeries, now_ms: int, n_windows: int
) -> np.ndarray:
    """Per-window realized correlation of two aligned 5-minute series."""
    stamps, v1, v2 = align_series(r1, r2)
    expected = HALF_DAY_MINUTES // r1.interval_minutes
    out = np.full(n_windows, np.nan)
    for w, sl in enumerate(_window_slices(stamps, now_ms, n_windows)):
        a, b = v1[sl], v2[sl]
        if len(a) != expected:
            continue
        rv1, rv2 = float(a @ a), float(b @ b)
        if rv1 <= 0 or rv2 <= 0:
            continue
        out[w] = float(a @ b / math.sqrt(rv1 * rv2))
    return out


def har_forecast_covariance(
    bars_by_sym: dict[str, tuple[np.ndarray, np.ndarray]],
    horizon_days: float,
    now_ms: int,
    lookback_days: int = LOOKBACK_DAYS,
) -> CovarianceForecast:
    """Forecast the covariance matrix by the decomposition approach.

    ``bars_by_sym`` maps each index symbol to (minute stamps, twap prices)
    over the trailing lookback. The half-day variance forecasts scale by
    2 * horizon_days; correlations do not scale.
    """
    syms = tuple(sorted(bars_by_sym))
    n_windows = lookback_days * HALF_DAYS_PER_DAY
    returns: dict[str, ReturnSeries] = {}
    variances = np.empty(len(syms))
    diagnostics: dict[str, object] = {}

    for i, sym in enumerate(syms):
        series = log_returns(bars_by_sym[sym], RETURN_INTERVAL_MINUTES, sym=sym)
        returns[sym] = series
        measures = half_day_measures(series, now_ms, n_windows)
        fit = fit_lharq(measures.rv, measures.period_return, measures.rq)
        log_rv_next = forecast_lharq(fit, measures.rv, measures.period_return, measures.rq)
        variances[i] = math.exp(log_rv_next) * HALF_DAYS_PER_DAY * horizon_days
        diagnostics[sym] = fit

    corr = np.eye(len(syms))
    for i in range(len(syms)):
        for j in range(i + 1, len(syms)):
            rcorr = half_day_correlations(
                returns[syms[i]], returns[syms[j]], now_ms, n_windows
            )
            forecast = _correlation_with_fallback(rcorr, syms[i], syms[j])
            corr[i, j] = corr[j, i] = forecast
            diagnostics[f"{syms[i]}/{syms[j]}"] = forecast

    vol = np.sqrt(variances)
    matrix = corr * np.outer(vol, vol)
    repaired, adjusted = ensure_psd(matrix)
    return CovarianceForecast(
        syms=syms,
        matrix=repaired,
        horizon_days=horizon_days,
        model="HAR",
        psd_adjusted=adjusted,
        meta={"fits": diagnostics},
    )


def _correlation_with_fallback(rcorr: np.ndarray, sym1: str, sym2: str) -> float:
    valid = rcorr[np.isfinite(rcorr)]
    if len(valid) == 0:
        raise DegenerateCorrelationError(
            f"no usable correlation windows for {sym1}/{sym2}"
        )
    try:
        fit = fit_har_corr(rcorr)
        forecast = forecast_har_corr(fit, rcorr)
    except InsufficientDataError:
        forecast = math.nan
    if not math.isfinite(forecast) or abs(forecast) > 1.0:
        fallback = float(np.mean(valid[-LONG_AVG_PERIODS:]))
        logger.debug(
            "correlation forecast %s for %s/%s out of range, using 5-day average %.4f",
            forecast, sym1, sym2, fallback,
        )
        forecast = fallback
    return min(1.0, max(-1.0, forecast))
