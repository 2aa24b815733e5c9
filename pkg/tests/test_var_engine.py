import math

import numpy as np
import pytest

from cryptovar.errors import DegeneratePortfolioError, ValidationError
from cryptovar.marketdata import MINUTE_MS
from cryptovar.tickengine.quotes import IndexQuote, MarketSnapshot, ProductQuote
from cryptovar.varengine import PortfolioBook, VarEngine, inv_norm_cdf

DAY_MS = 86_400_000
NOW = 40 * DAY_MS


class StubData:
    """Market data surface backed by synthetic GBM minute bars."""

    def __init__(self, seed=0, vol_per_min=None, rho=0.6, days=20):
        rng = np.random.default_rng(seed)
        vol_per_min = vol_per_min or {"BTC": 4.2e-4, "ETH": 5.0e-4}
        n = days * 1440
        self.minutes = NOW - (n - np.arange(n)) * MINUTE_MS
        base = rng.standard_normal(n)
        self.prices = {}
        s0 = {"BTC": 30_000.0, "ETH": 1_900.0}
        for i, (sym, vol) in enumerate(vol_per_min.items()):
            eps = base if i == 0 else rho * base + math.sqrt(1 - rho**2) * rng.standard_normal(n)
            self.prices[sym] = s0[sym] * np.exp(np.cumsum(vol * eps))
        self.snapshot_obj = MarketSnapshot(
            index={
                sym: IndexQuote(price=float(p[-1]), time=NOW - 1000)
                for sym, p in self.prices.items()
            },
            product={
                "BTC-29DEC23": ProductQuote(
                    mark_price=float(self.prices["BTC"][-1]), time=NOW - 1000
                ),
                "ETH-29DEC23": ProductQuote(
                    mark_price=float(self.prices["ETH"][-1]), time=NOW - 1000
                ),
                "BTC-29DEC23-30000-C": ProductQuote(
                    mark_price=0.06, time=NOW - 1000, delta=0.55, gamma=1.1e-4, theta=-14.0,
                ),
                "ETH-29DEC23-2000-C": ProductQuote(
                    mark_price=0.05, time=NOW - 1000, delta=0.48, gamma=1.6e-3, theta=-1.1,
                ),
            },
        )

    def inference_window(self, sym, days, now_ms):
        lo = now_ms - days * DAY_MS
        mask = (self.minutes >= lo) & (self.minutes < now_ms)
        return self.minutes[mask], self.prices[sym][mask]

    def snapshot(self):
        return self.snapshot_obj

    def latest_time(self):
        return NOW


@pytest.fixture(scope="module")
def env():
    data = StubData()
    book = PortfolioBook()
    book.add("fut", "BTC-29DEC23", 2.0)
    book.add("mixed", "BTC-29DEC23-30000-C", 5.0)
    book.add("mixed", "ETH-29DEC23-2000-C", -3.0)
    book.add("mixed", "BTC-29DEC23", 0.5)
    return VarEngine(data, book), data, book


def test_linear_portfolio_reduces_to_gaussian(env):
    engine, data, _ = env
    result = engine.estimate_var("fut", 0.95, 1.0, model="EWMA")
    forecast = engine.forecast_covariance(("BTC",), "EWMA", 1.0, NOW)
    sigma = math.sqrt(forecast.matrix[0, 0])
    expected_q = inv_norm_cdf(0.05) * sigma
    assert result.moments.skew == 0.0
    assert result.q_return == pytest.approx(expected_q, abs=1e-9)
    assert result.var_value == pytest.approx(expected_q * result.portfolio_value, rel=1e-12)
    assert result.var_value < 0  # loss quantile for a long book
    assert result.valid


def test_horizon_scaling_sqrt_for_linear_book(env):
    engine, _, _ = env
    one = engine.estimate_var("fut", 0.95, 1.0, model="EWMA")
    two = engine.estimate_var("fut", 0.95, 2.0, model="EWMA")
    assert two.q_return == pytest.approx(math.sqrt(2.0) * one.q_return, rel=1e-9)


def test_quantity_scaling_leaves_q_return(env):
    engine, _, book = env
    book.add("fut2", "BTC-29DEC23", 6.0)
    base = engine.estimate_var("fut", 0.95, 1.0, model="EWMA")
    scaled = engine.estimate_var("fut2", 0.95, 1.0, model="EWMA")
    assert scaled.q_return == pytest.approx(base.q_return, rel=1e-12)
    assert scaled.var_value == pytest.approx(3.0 * base.var_value, rel=1e-12)


def test_latencies_recorded(env):
    engine, _, _ = env
    result = engine.estimate_var("fut", 0.95, 1.0, model="EWMA")
    lat = result.latency
    assert lat.t1_ms >= 0 and lat.t2_ms >= 0 and lat.t3_ms >= 0
    assert lat.total_ms >= lat.t1_ms + lat.t2_ms + lat.t3_ms - 1e-9


def test_option_book_matches_monte_carlo(env):
    engine, _, _ = env
    result = engine.estimate_var("mixed", 0.95, 1.0, model="EWMA")
    forecast = engine.forecast_covariance(("BTC", "ETH"), "EWMA", 1.0, NOW)

    # Monte Carlo oracle on the same mapped quadratic form
    from cryptovar.varengine import adjust_greeks, compress_by_underlying

    coeffs = compress_by_underlying(
        adjust_greeks(engine.book.positions("mixed"), engine.data.snapshot(), NOW)
    )
    rng = np.random.default_rng(123)
    draws = rng.multivariate_normal([0, 0], forecast.matrix, size=1_000_000)
    rp = (
        draws @ coeffs.delta
        + 0.5 * np.einsum("ij,j,ij->i", draws, coeffs.gamma_diag, draws)
        + np.sum(coeffs.theta)
    )
    mc_q = float(np.quantile(rp, 0.05))
    # MC standard error of the quantile via the asymptotic density estimate
    density = float(
        np.mean(np.abs(rp - mc_q) < 5e-5) / 1e-4
    )
    se = math.sqrt(0.05 * 0.95 / len(rp)) / max(density, 1e-12)
    assert abs(result.q_return - mc_q) < 3 * se + 1e-6


def test_validation_errors(env):
    engine, _, _ = env
    with pytest.raises(ValidationError):
        engine.estimate_var("fut", 0.4, 1.0)
    with pytest.raises(ValidationError):
        engine.estimate_var("fut", 0.95, -1.0)
    with pytest.raises(ValidationError):
        engine.estimate_var("fut", 0.95, 1.0, model="SV")


def test_empty_portfolio_rejected(env):
    engine, _, _ = env
    with pytest.raises(DegeneratePortfolioError):
        engine.estimate_var("nobody", 0.95, 1.0)


def test_har_and_garch_paths_produce_results(env):
    engine, _, _ = env
    har = engine.estimate_var("fut", 0.99, 1.0, model="HAR")
    assert har.q_return < 0
    assert har.model == "HAR"
    garch = engine.estimate_var("fut", 0.99, 1.0, model="GARCH")
    assert garch.q_return < 0
    # same data-generating process: forecasts should agree on rough scale
    assert 0.2 < abs(har.q_return / garch.q_return) < 5.0
