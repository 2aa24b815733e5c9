from datetime import date

import pytest

from cryptovar.errors import ParseError
from cryptovar.marketdata import format_instrument, parse_instrument


def test_parse_future():
    inst = parse_instrument("BTC-29DEC23")
    assert inst.kind == "future"
    assert inst.underlying == "BTC"
    assert inst.maturity == date(2023, 12, 29)
    assert inst.strike is None
    assert inst.option_type is None


def test_parse_call_option():
    inst = parse_instrument("ETH-29DEC23-2000-C")
    assert inst.kind == "option"
    assert inst.underlying == "ETH"
    assert inst.maturity == date(2023, 12, 29)
    assert inst.strike == 2000.0
    assert inst.option_type == "call"


def test_parse_put_option_single_digit_day():
    inst = parse_instrument("BTC-9JUN23-25000-P")
    assert inst.maturity == date(2023, 6, 9)
    assert inst.option_type == "put"


def test_parse_index():
    inst = parse_instrument("BTC")
    assert inst.kind == "index"
    assert inst.underlying == "BTC"
    assert inst.maturity is None


@pytest.mark.parametrize(
    "bad",
    [
        "",
        "BTC--X",
        "BTC-29DEC23-2000",  # three tokens
        "BTC-29XXX23",
        "BTC-99DEC23",
        "BTC-29DEC23--C",
        "BTC-29DEC23-0-C",
        "BTC-29DEC23--2000-C",
        "BTC-29DEC23-2000-Z",
        "BTC-29DEC23-abc-C",
    ],
)
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_instrument(bad)


@pytest.mark.parametrize(
    "ident",
    ["BTC-29DEC23", "ETH-29DEC23-2000-C", "BTC-9JUN23-25000-P", "ETH", "BTC-1FEB24"],
)
def test_round_trip(ident):
    assert format_instrument(parse_instrument(ident)) == ident
