"""End-to-end portfolio VaR workflow.

positions -> underlying indices -> covariance inference -> delta-gamma-theta
mapping -> Cornish-Fisher transformation -> monetary VaR, with per-stage
latency attribution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

from cryptovar.errors import (
    CryptoVarError,
    DegeneratePortfolioError,
    ValidationError,
)
from cryptovar.latency import LatencyReport, StageTimer
from cryptovar.marketdata.bars import log_returns, resample_twap
from cryptovar.models import (
    STUDENT_T,
    CovarianceForecast,
    dcc_forecast_covariance,
    ewma_covariance_matrix,
    fit_dcc_garch,
    har_forecast_covariance,
)
from cryptovar.models.ewma import DEFAULT_LAMBDA
from cryptovar.models.har import LOOKBACK_DAYS as HAR_LOOKBACK_DAYS
from cryptovar.tickengine.quotes import MarketSnapshot
from cryptovar.varengine.mapping import (
    MappedCoefficients,
    adjust_greeks,
    compress_by_underlying,
)
from cryptovar.varengine.moments import Moments, central_moments
from cryptovar.varengine.portfolio import PortfolioBook, extract_indices
from cryptovar.varengine.quantile import cf_validity, cornish_fisher_z

MODELS = ("EWMA", "GARCH", "HAR")
RETURN_BAR_MINUTES = 30
RETURN_LOOKBACK_DAYS = 5


class MarketData(Protocol):
    """Data surface the VaR engine consumes."""

    def inference_window(self, sym: str, days: int, now_ms: int) -> tuple:
        """Trailing (minute stamps, twap prices) for an index symbol."""

    def snapshot(self) -> MarketSnapshot: ...

    def latest_time(self) -> int: ...


@dataclass(frozen=True)
class VaRResult:
    pid: str
    confidence: float
    horizon_days: float
    model: str
    z_cf: float
    q_return: float
    var_value: float
    portfolio_value: float
    moments: Moments
    valid: bool
    syms: tuple[str, ...]
    latency: LatencyReport

    def as_dict(self) -> dict:
        return {
            "pid": self.pid,
            "confidence": self.confidence,
            "horizon_days": self.horizon_days,
            "model": self.model,
            "z_cf": self.z_cf,
            "q_return": self.q_return,
            "var_value": self.var_value,
            "portfolio_value": self.portfolio_value,
            "moments": {
                "mu1": self.moments.mu1,
                "mu2": self.moments.mu2,
                "mu3": self.moments.mu3,
                "mu4": self.moments.mu4,
                "skew": self.moments.skew,
                "kurt": self.moments.kurt,
            },
            "valid": self.valid,
            "syms": list(self.syms),
            "latency": self.latency.as_dict(),
        }


def _stage(exc: CryptoVarError, name: str) -> CryptoVarError:
    if not hasattr(exc, "stage"):
        exc.stage = name  # type: ignore[attr-defined]
    return exc


class VarEngine:
    """Computes portfolio VaR against a market-data surface."""

    def __init__(
        self,
        data: MarketData,
        book: PortfolioBook,
        decay: float = DEFAULT_LAMBDA,
        garch_dist: str = STUDENT_T,
        har_lookback_days: int = HAR_LOOKBACK_DAYS,
        stale_ms: int = 60_000,
    ):
        self.data = data
        self.book = book
        self.decay = decay
        self.garch_dist = garch_dist
        self.har_lookback_days = har_lookback_days
        self.stale_ms = stale_ms

    def _thirty_minute_returns(self, syms, now_ms):
        out = {}
        for sym in syms:
            minutes, prices = self.data.inference_window(
                sym, RETURN_LOOKBACK_DAYS, now_ms
            )
            bucket_starts, bucket_means = resample_twap(
                minutes, prices, RETURN_BAR_MINUTES
            )
            out[sym] = log_returns(
                (bucket_starts, bucket_means), RETURN_BAR_MINUTES, sym=sym
            )
        return out

    def forecast_covariance(
        self, syms: tuple[str, ...], model: str, horizon_days: float, now_ms: int
    ) -> CovarianceForecast:
        if model == "EWMA":
            returns = self._thirty_minute_returns(syms, now_ms)
            return ewma_covariance_matrix(returns, self.decay, horizon_days)
        if model == "GARCH":
            returns = self._thirty_minute_returns(syms, now_ms)
            fits, dcc = fit_dcc_garch(
                {s: r.values for s, r in returns.items()}, dist=self.garch_dist
            )
            return dcc_forecast_covariance(fits, dcc, horizon_days)
        bars = {
            sym: self.data.inference_window(sym, self.har_lookback_days, now_ms)
            for sym in syms
        }
        return har_forecast_covariance(
            bars, horizon_days, now_ms, lookback_days=self.har_lookback_days
        )

    def estimate_var(
        self,
        pid: str,
        confidence: float,
        horizon_days: float,
        model: str = "HAR",
        now_ms: int | None = None,
    ) -> VaRResult:
        if not 0.5 < confidence < 1.0:
            raise ValidationError(f"confidence {confidence} outside (0.5, 1)")
        if horizon_days <= 0:
            raise ValidationError(f"horizon {horizon_days} must be positive")
        if model not in MODELS:
            raise ValidationError(f"unknown model {model!r} (expected one of {MODELS})")

        positions = self.book.positions(pid)
        if not positions:
            raise DegeneratePortfolioError(f"portfolio {pid} is empty")
        syms = extract_indices(positions)
        now = now_ms if now_ms is not None else self.data.latest_time()

        timer = StageTimer()
        try:
            with timer.stage("inference"):
                forecast = self.forecast_covariance(syms, model, horizon_days, now)
        except CryptoVarError as exc:
            raise _stage(exc, "inference")
        return self._map_and_transform(
            pid, confidence, horizon_days, model, forecast, positions, now, timer
        )

    def estimate_with_forecast(
        self,
        pid: str,
        confidence: float,
        horizon_days: float,
        forecast: CovarianceForecast,
        now_ms: int | None = None,
        model_tag: str | None = None,
    ) -> VaRResult:
        """Run mapping + transformation against an externally supplied forecast.

        Used by the backtests to feed the ex-post realized covariance
        benchmark through the standard path.
        """
        positions = self.book.positions(pid)
        if not positions:
            raise DegeneratePortfolioError(f"portfolio {pid} is empty")
        now = now_ms if now_ms is not None else self.data.latest_time()
        return self._map_and_transform(
            pid,
            confidence,
            horizon_days,
            model_tag or forecast.model,
            forecast,
            positions,
            now,
            StageTimer(),
        )

    def _map_and_transform(
        self, pid, confidence, horizon_days, model, forecast, positions, now, timer
    ) -> VaRResult:

        try:
            with timer.stage("mapping"):
                snapshot = self.data.snapshot()
                coeffs = compress_by_underlying(
                    adjust_greeks(positions, snapshot, now, stale_ms=self.stale_ms)
                )
        except CryptoVarError as exc:
            raise _stage(exc, "mapping")

        try:
            with timer.stage("transformation"):
                result = self._transform(
                    pid, confidence, horizon_days, model, forecast, coeffs
                )
        except CryptoVarError as exc:
            raise _stage(exc, "transformation")

        return VaRResult(
            pid=result.pid,
            confidence=result.confidence,
            horizon_days=result.horizon_days,
            model=result.model,
            z_cf=result.z_cf,
            q_return=result.q_return,
            var_value=result.var_value,
            portfolio_value=result.portfolio_value,
            moments=result.moments,
            valid=result.valid,
            syms=result.syms,
            latency=timer.report(),
        )

    def _transform(
        self,
        pid: str,
        confidence: float,
        horizon_days: float,
        model: str,
        forecast: CovarianceForecast,
        coeffs: MappedCoefficients,
    ) -> VaRResult:
        moments = central_moments(coeffs, forecast, horizon_days)
        alpha = 1.0 - confidence
        z_cf = cornish_fisher_z(moments.skew, moments.kurt, alpha)
        q_return = moments.mu1 + moments.sigma_v * z_cf
        return VaRResult(
            pid=pid,
            confidence=confidence,
            horizon_days=horizon_days,
            model=model,
            z_cf=z_cf,
            q_return=q_return,
            var_value=q_return * coeffs.portfolio_value,
            portfolio_value=coeffs.portfolio_value,
            moments=moments,
            valid=cf_validity(moments.skew, moments.kurt - 3.0),
            syms=coeffs.syms,
            latency=LatencyReport(0, 0, 0, 0, 0),
        )
