"""Delta-gamma-theta mapping of positions onto underlying index returns.

Each holding's return is approximated as
``r = delta*(P/V)*R + 0.5*Gamma*(P^2/V)*R^2 + theta*tau/V`` and the
portfolio return is the value-weighted sum, compressed per underlying
(products share single underlyings, so cross-gamma terms vanish and the
gamma matrix stays diagonal).

Option marks are crypto-quoted and converted to USD with the latest index
price; futures marks are USD already. Feed greeks are USD sensitivities
per contract (theta per day).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cryptovar.errors import DegeneratePortfolioError, StaleDataError
from cryptovar.marketdata.instruments import FUTURE, INDEX
from cryptovar.tickengine.quotes import MarketSnapshot
from cryptovar.varengine.portfolio import Position

STALE_THRESHOLD_MS = 60_000


@dataclass(frozen=True)
class PositionCoefficients:
    """Weighted mapping terms for one holding."""

    instrument_id: str
    underlying: str
    delta_term: float
    gamma_term: float
    theta_term: float
    value: float


@dataclass(frozen=True)
class MappedCoefficients:
    """Per-underlying compressed coefficient vectors plus portfolio value."""

    syms: tuple[str, ...]
    delta: np.ndarray
    gamma_diag: np.ndarray
    theta: np.ndarray
    portfolio_value: float

    def theta_drift(self, tau_days: float) -> float:
        return float(tau_days * np.sum(self.theta))

    def portfolio_return(self, index_returns: np.ndarray, tau_days: float) -> float:
        """Evaluate the quadratic return approximation at one return vector."""
        r = np.asarray(index_returns, dtype=float)
        return float(
            self.delta @ r + 0.5 * (self.gamma_diag * r) @ r + self.theta_drift(tau_days)
        )


def _fresh(time_ms: int, now_ms: int, stale_ms: int) -> bool:
    return now_ms - time_ms <= stale_ms


def adjust_greeks(
    positions: list[Position],
    snapshot: MarketSnapshot,
    now_ms: int,
    stale_ms: int = STALE_THRESHOLD_MS,
) -> list[PositionCoefficients]:
    """Transform holdings and latest market data into weighted coefficients.

    Raises :class:`StaleDataError` naming the instrument when its market
    data is missing or older than ``stale_ms``;
    :class:`DegeneratePortfolioError` when net portfolio value vanishes.
    """
    if not positions:
        raise DegeneratePortfolioError("empty portfolio")

    rows = []  # (position, P, value, holding delta/gamma/theta)
    for pos in positions:
        inst = pos.instrument
        index_quote = snapshot.index.get(inst.underlying)
        if index_quote is None or not _fresh(index_quote.time, now_ms, stale_ms):
            raise StaleDataError(inst.underlying)
        underlying_price = index_quote.price

        if inst.kind == INDEX:
            value = pos.quantity * underlying_price
            greeks = (pos.quantity, 0.0, 0.0)
        else:
            quote = snapshot.product.get(inst.id)
            if quote is None or not _fresh(quote.time, now_ms, stale_ms):
                raise StaleDataError(inst.id)
            if inst.kind == FUTURE:
                value = pos.quantity * quote.mark_price
                greeks = (pos.quantity, 0.0, 0.0)
            else:  # option, crypto-quoted mark
                value = pos.quantity * quote.mark_price * underlying_price
                if quote.delta is None or quote.gamma is None or quote.theta is None:
                    raise StaleDataError(inst.id, f"greeks missing for {inst.id}")
                greeks = (
                    pos.quantity * quote.delta,
                    pos.quantity * quote.gamma,
                    pos.quantity * quote.theta,
                )
        rows.append((pos, underlying_price, value, greeks))

    total_value = sum(value for _, _, value, _ in rows)
    gross_value = sum(abs(value) for _, _, value, _ in rows)
    if gross_value <= 0.0 or abs(total_value) < 1e-9 * gross_value:
        raise DegeneratePortfolioError(
            f"net portfolio value {total_value:g} too small for weighting"
        )

    out = []
    for pos, price, value, (h_delta, h_gamma, h_theta) in rows:
        # w_i * (P/V) * delta collapses to P * delta / total since w = V/total
        out.append(
            PositionCoefficients(
                instrument_id=pos.instrument.id,
                underlying=pos.instrument.underlying,
                delta_term=price * h_delta / total_value,
                gamma_term=price * price * h_gamma / total_value,
                theta_term=h_theta / total_value,
                value=value,
            )
        )
    return out


def compress_by_underlying(coefficients: list[PositionCoefficients]) -> MappedCoefficients:
    """Aggregate per-position coefficients over shared underlyings.

    The quadratic form is preserved exactly: entries are additive within an
    underlying because every product references a single index.
    """
    syms = tuple(sorted({c.underlying for c in coefficients}))
    index = {s: i for i, s in enumerate(syms)}
    delta = np.zeros(len(syms))
    gamma = np.zeros(len(syms))
    theta = np.zeros(len(syms))
    total = 0.0
    for c in coefficients:
        i = index[c.underlying]
        delta[i] += c.delta_term
        gamma[i] += c.gamma_term
        theta[i] += c.theta_term
        total += c.value
    return MappedCoefficients(
        syms=syms, delta=delta, gamma_diag=gamma, theta=theta, portfolio_value=total
    )
