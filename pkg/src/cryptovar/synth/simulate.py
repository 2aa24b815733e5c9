"""Synthetic market generator: SV index paths, option universes, feed files.

Used for recorded-feed fixtures, benchmarks and the coverage calibration
campaign. Index log-returns follow a stochastic-volatility model (OU
log-variance with correlated innovations across indices); option marks and
greeks come from a flat-vol Black pricer with zero rate, quoted the way
the engine consumes them (crypto-quoted marks, USD greeks per contract).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from cryptovar.marketdata.bars import DAY_MS, MINUTE_MS, Tick

MINUTES_PER_YEAR = 365 * 1440


@dataclass
class SvParams:
    annual_vol: float = 0.40
    vol_of_vol: float = 1.5      # per sqrt(day) on log-variance
    mean_reversion_days: float = 2.0
    rho: float = 0.7             # cross-index return correlation
    s0: dict[str, float] = field(
        default_factory=lambda: {"BTC": 30_000.0, "ETH": 1_900.0}
    )


def sv_index_paths(
    syms: tuple[str, ...],
    n_minutes: int,
    seed: int,
    params: SvParams | None = None,
) -> dict[str, np.ndarray]:
    """Per-minute price paths with stochastic volatility, one per index."""
    params = params or SvParams()
    rng = np.random.default_rng(seed)
    n_syms = len(syms)

    var_bar = params.annual_vol**2 / MINUTES_PER_YEAR
    h_bar = math.log(var_bar)
    kappa = 1.0 / (params.mean_reversion_days * 1440.0)
    xi = params.vol_of_vol / math.sqrt(1440.0)

    corr = np.full((n_syms, n_syms), params.rho)
    np.fill_diagonal(corr, 1.0)
    chol = np.linalg.cholesky(corr)
    eps = rng.standard_normal((n_minutes, n_syms)) @ chol.T
    eta = rng.standard_normal((n_minutes, n_syms))

    paths = {}
    h = np.full(n_syms, h_bar)
    log_prices = np.empty((n_minutes, n_syms))
    level = np.array([params.s0.get(s, 100.0) for s in syms])
    log_p = np.log(level)
    for t in range(n_minutes):
        vol = np.exp(0.5 * h)
        log_p = log_p + vol * eps[t]
        log_prices[t] = log_p
        h = h + kappa * (h_bar - h) + xi * eta[t]
    for i, sym in enumerate(syms):
        paths[sym] = np.exp(log_prices[:, i])
    return paths


# -- instruments and pricing -------------------------------------------------


def _norm_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def _norm_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class OptionQuote:
    mark_crypto: float
    delta: float
    gamma: float
    theta: float
    implied_vol: float


def black_quote(
    spot: float, strike: float, vol: float, years: float, is_call: bool
) -> OptionQuote:
    """Zero-rate Black-Scholes value and USD greeks for one contract."""
    years = max(years, 1.0 / 365.0 / 24.0)
    sqrt_t = math.sqrt(years)
    d1 = (math.log(spot / strike) + 0.5 * vol * vol * years) / (vol * sqrt_t)
    d2 = d1 - vol * sqrt_t
    if is_call:
        price = spot * _norm_cdf(d1) - strike * _norm_cdf(d2)
        delta = _norm_cdf(d1)
    else:
        price = strike * _norm_cdf(-d2) - spot * _norm_cdf(-d1)
        delta = _norm_cdf(d1) - 1.0
    gamma = _norm_pdf(d1) / (spot * vol * sqrt_t)
    theta_per_day = -(spot * _norm_pdf(d1) * vol) / (2.0 * sqrt_t) / 365.0
    price = max(price, 1e-8 * spot)
    return OptionQuote(
        mark_crypto=price / spot,
        delta=delta,
        gamma=gamma,
        theta=theta_per_day,
        implied_vol=vol,
    )


_MONTH_NAMES = ("JAN", "FEB", "MAR", "APR", "MAY", "JUN",
                "JUL", "AUG", "SEP", "OCT", "NOV", "DEC")


def _maturity_token(epoch_ms: int) -> str:
    days = epoch_ms // DAY_MS
    # civil date from epoch day count
    import datetime

    d = datetime.date(1970, 1, 1) + datetime.timedelta(days=int(days))
    return f"{d.day}{_MONTH_NAMES[d.month - 1]}{d.year % 100:02d}"


@dataclass(frozen=True)
class SyntheticInstrument:
    id: str
    underlying: str
    kind: str
    maturity_ms: int
    strike: float | None = None
    is_call: bool | None = None


def make_universe(
    start_ms: int,
    syms: tuple[str, ...] = ("BTC", "ETH"),
    s0: dict[str, float] | None = None,
    options_per_underlying: int = 0,
    maturities_days: tuple[int, ...] = (7, 30, 90, 180),
) -> list[SyntheticInstrument]:
    """Futures plus optional option chains, named by the exchange convention."""
    s0 = s0 or {"BTC": 30_000.0, "ETH": 1_900.0}
    out: list[SyntheticInstrument] = []
    for sym in syms:
        spot = s0.get(sym, 100.0)
        for days_out in maturities_days:
            maturity_ms = ((start_ms // DAY_MS) + days_out) * DAY_MS
            token = _maturity_token(maturity_ms)
            out.append(
                SyntheticInstrument(
                    id=f"{sym}-{token}",
                    underlying=sym,
                    kind="future",
                    maturity_ms=maturity_ms,
                )
            )
        if options_per_underlying <= 0:
            continue
        per_maturity = max(1, options_per_underlying // (2 * len(maturities_days)))
        for days_out in maturities_days:
            maturity_ms = ((start_ms // DAY_MS) + days_out) * DAY_MS
            token = _maturity_token(maturity_ms)
            strikes = np.linspace(0.6 * spot, 1.5 * spot, per_maturity)
            for strike in strikes:
                strike_val = float(round(strike, -1 if spot > 5000 else 0))
                for is_call in (True, False):
                    side = "C" if is_call else "P"
                    out.append(
                        SyntheticInstrument(
                            id=f"{sym}-{token}-{strike_val:g}-{side}",
                            underlying=sym,
                            kind="option",
                            maturity_ms=maturity_ms,
                            strike=strike_val,
                            is_call=is_call,
                        )
                    )
    return out


def feed_ticks(
    paths: dict[str, np.ndarray],
    start_ms: int,
    universe: list[SyntheticInstrument] | None = None,
    product_interval_minutes: int = 1,
    vol_for_quotes: float = 0.40,
) -> Iterator[Tick]:
    """Time-ordered ticks: every index each minute, products on their cadence.

    Futures tick with mark equal to the index level; options are re-priced
    from the index path. Tick times are offset inside the minute so
    instruments arrive at distinct times.
    """
    syms = sorted(paths)
    n = len(paths[syms[0]])
    universe = universe or []
    by_underlying: dict[str, list[SyntheticInstrument]] = {}
    for inst in universe:
        by_underlying.setdefault(inst.underlying, []).append(inst)

    for t in range(n):
        minute = start_ms + t * MINUTE_MS
        for k, sym in enumerate(syms):
            price = float(paths[sym][t])
            yield Tick(instrument=sym, time=minute + 17 * (k + 1), index_price=price)
        if t % product_interval_minutes:
            continue
        for sym in syms:
            spot = float(paths[sym][t])
            for j, inst in enumerate(by_underlying.get(sym, ())):
                tick_time = minute + 300 + (j % 40) * 7
                if inst.kind == "future":
                    yield Tick(instrument=inst.id, time=tick_time, mark_price=spot)
                else:
                    years = max((inst.maturity_ms - minute), MINUTE_MS) / (365.0 * DAY_MS)
                    quote = black_quote(spot, inst.strike, vol_for_quotes, years, inst.is_call)
                    yield Tick(
                        instrument=inst.id,
                        time=tick_time,
                        mark_price=quote.mark_crypto,
                        index_price=spot,
                        delta=quote.delta,
                        gamma=quote.gamma,
                        theta=quote.theta,
                        implied_vol=quote.implied_vol,
                    )
