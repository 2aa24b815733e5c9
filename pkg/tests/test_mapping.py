import numpy as np
import pytest

from cryptovar.errors import DegeneratePortfolioError, StaleDataError
from cryptovar.marketdata import parse_instrument
from cryptovar.tickengine.quotes import IndexQuote, MarketSnapshot, ProductQuote
from cryptovar.varengine import adjust_greeks, compress_by_underlying
from cryptovar.varengine.portfolio import Position

NOW = 1_000_000_000


def pos(pid, inst_id, qty):
    return Position(pid=pid, instrument=parse_instrument(inst_id), quantity=qty)


def snapshot(index=None, product=None, t=NOW):
    index = {
        sym: IndexQuote(price=price, time=t) for sym, price in (index or {}).items()
    }
    product = {
        sym: ProductQuote(time=t, **fields) for sym, fields in (product or {}).items()
    }
    return MarketSnapshot(index=index, product=product)


def test_single_future_delta_one():
    # future mark equals the index level, so the lone holding maps to
    # delta 1 exactly (linear product, coefficient 1)
    snap = snapshot(
        index={"BTC": 30_000.0}, product={"BTC-29DEC23": {"mark_price": 30_000.0}}
    )
    coeffs = compress_by_underlying(
        adjust_greeks([pos("p", "BTC-29DEC23", 3.0)], snap, NOW)
    )
    assert coeffs.syms == ("BTC",)
    assert coeffs.delta[0] == pytest.approx(1.0, rel=1e-12)
    assert coeffs.gamma_diag[0] == 0.0
    assert coeffs.theta[0] == 0.0
    assert coeffs.portfolio_value == pytest.approx(90_000.0)


def test_sole_option_delta_term():
    # option with delta .5, gamma/theta 0: delta term = w*(P/V)*delta = P*0.5/V
    mark_crypto = 0.05
    snap = snapshot(
        index={"BTC": 30_000.0},
        product={
            "BTC-29DEC23-30000-C": {
                "mark_price": mark_crypto,
                "delta": 0.5,
                "gamma": 0.0,
                "theta": 0.0,
            }
        },
    )
    coeffs = compress_by_underlying(
        adjust_greeks([pos("p", "BTC-29DEC23-30000-C", 2.0)], snap, NOW)
    )
    value = 2.0 * mark_crypto * 30_000.0
    assert coeffs.portfolio_value == pytest.approx(value)
    assert coeffs.delta[0] == pytest.approx(30_000.0 * 2.0 * 0.5 / value, rel=1e-12)


def test_empty_portfolio_degenerate():
    with pytest.raises(DegeneratePortfolioError):
        adjust_greeks([], snapshot(index={"BTC": 30_000.0}), NOW)


def test_offsetting_book_degenerate():
    snap = snapshot(
        index={"BTC": 30_000.0}, product={"BTC-29DEC23": {"mark_price": 30_000.0}}
    )
    with pytest.raises(DegeneratePortfolioError):
        adjust_greeks(
            [pos("p", "BTC-29DEC23", 1.0), pos("p", "BTC-29DEC23", -1.0)], snap, NOW
        )


def test_missing_market_data_names_instrument():
    snap = snapshot(index={"BTC": 30_000.0})
    with pytest.raises(StaleDataError) as err:
        adjust_greeks([pos("p", "BTC-29DEC23", 1.0)], snap, NOW)
    assert "BTC-29DEC23" in str(err.value)


def test_stale_quote_rejected():
    snap = snapshot(
        index={"BTC": 30_000.0},
        product={"BTC-29DEC23": {"mark_price": 30_000.0}},
        t=NOW - 61_000,
    )
    with pytest.raises(StaleDataError):
        adjust_greeks([pos("p", "BTC-29DEC23", 1.0)], snap, NOW)


def test_two_underlyings_length_two():
    snap = snapshot(
        index={"BTC": 30_000.0, "ETH": 1_900.0},
        product={
            "BTC-29DEC23": {"mark_price": 30_000.0},
            "ETH-29DEC23": {"mark_price": 1_900.0},
        },
    )
    coeffs = compress_by_underlying(
        adjust_greeks(
            [pos("p", "BTC-29DEC23", 1.0), pos("p", "ETH-29DEC23", 10.0)], snap, NOW
        )
    )
    assert coeffs.syms == ("BTC", "ETH")
    assert len(coeffs.delta) == len(coeffs.gamma_diag) == len(coeffs.theta) == 2


def test_two_same_underlying_options_aggregate():
    snap = snapshot(
        index={"BTC": 30_000.0},
        product={
            "BTC-29DEC23-30000-C": {
                "mark_price": 0.05, "delta": 0.5, "gamma": 1e-4, "theta": -12.0,
            },
            "BTC-29DEC23-35000-C": {
                "mark_price": 0.02, "delta": 0.25, "gamma": 6e-5, "theta": -9.0,
            },
        },
    )
    positions = [
        pos("p", "BTC-29DEC23-30000-C", 1.0),
        pos("p", "BTC-29DEC23-35000-C", 2.0),
    ]
    per_position = adjust_greeks(positions, snap, NOW)
    coeffs = compress_by_underlying(per_position)
    assert len(coeffs.delta) == 1
    assert coeffs.delta[0] == pytest.approx(
        sum(c.delta_term for c in per_position), rel=1e-12
    )


def test_compression_preserves_quadratic_form():
    rng = np.random.default_rng(17)
    product = {}
    positions = []
    for i in range(50):
        underlying = "BTC" if i % 2 == 0 else "ETH"
        strike = 20_000 + 500 * i if underlying == "BTC" else 1_500 + 50 * i
        inst = f"{underlying}-29DEC23-{strike}-C"
        product[inst] = {
            "mark_price": float(rng.uniform(0.01, 0.2)),
            "delta": float(rng.uniform(-1, 1)),
            "gamma": float(rng.uniform(0, 3e-4)),
            "theta": float(rng.uniform(-20, 0)),
        }
        positions.append(pos("p", inst, float(rng.choice([-3, -1, 1, 2, 5]))))
    snap = snapshot(index={"BTC": 30_000.0, "ETH": 1_900.0}, product=product)

    per_position = adjust_greeks(positions, snap, NOW)
    coeffs = compress_by_underlying(per_position)

    sym_index = {s: i for i, s in enumerate(coeffs.syms)}
    tau = 1.0
    for _ in range(100):
        r = rng.normal(0, 0.05, 2)
        # uncompressed quadratic form evaluated per position
        uncompressed = sum(
            c.delta_term * r[sym_index[c.underlying]]
            + 0.5 * c.gamma_term * r[sym_index[c.underlying]] ** 2
            + tau * c.theta_term
            for c in per_position
        )
        assert coeffs.portfolio_return(r, tau) == pytest.approx(
            uncompressed, rel=1e-10, abs=1e-14
        )
