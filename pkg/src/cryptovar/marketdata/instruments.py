"""Instrument identifiers and parsing.

Derivative symbols follow the ``CRYPTO-DDMMMYY(-STRIKE-C|P)`` convention,
e.g. ``BTC-29DEC23`` for a future and ``ETH-29DEC23-2000-C`` for a call.
A bare crypto symbol (``BTC``) names the underlying index itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date

from cryptovar.errors import ParseError

FUTURE = "future"
OPTION = "option"
INDEX = "index"

_MONTHS = {
    "JAN": 1, "FEB": 2, "MAR": 3, "APR": 4, "MAY": 5, "JUN": 6,
    "JUL": 7, "AUG": 8, "SEP": 9, "OCT": 10, "NOV": 11, "DEC": 12,
}
_MONTHS_INV = {v: k for k, v in _MONTHS.items()}


@dataclass(frozen=True)
class Instrument:
    """A parsed market instrument.

    ``underlying`` is the index symbol the product settles against; for an
    index instrument it is the symbol itself.
    """

    id: str
    underlying: str
    kind: str
    maturity: date | None = None
    strike: float | None = None
    option_type: str | None = None  # "call" | "put"


def _parse_maturity(token: str, full_id: str) -> date:
    if len(token) < 6:
        raise ParseError(f"unparseable maturity {token!r} in {full_id!r}")
    year_part, month_part, day_part = token[-2:], token[-5:-2], token[:-5]
    if month_part not in _MONTHS or not day_part.isdigit() or not year_part.isdigit():
        raise ParseError(f"unparseable maturity {token!r} in {full_id!r}")
    try:
        return date(2000 + int(year_part), _MONTHS[month_part], int(day_part))
    except ValueError as exc:
        raise ParseError(f"unparseable maturity {token!r} in {full_id!r}") from exc


def parse_instrument(instrument_id: str) -> Instrument:
    """Parse an identifier into an :class:`Instrument`.

    Raises :class:`ParseError` naming the offending segment on malformed
    token counts, bad maturity dates or non-positive strikes.
    """
    if not instrument_id:
        raise ParseError("empty instrument id")
    tokens = instrument_id.split("-")
    if any(t == "" for t in tokens):
        raise ParseError(f"empty segment in {instrument_id!r}")

    if len(tokens) == 1:
        return Instrument(id=instrument_id, underlying=tokens[0], kind=INDEX)

    if len(tokens) == 2:
        maturity = _parse_maturity(tokens[1], instrument_id)
        return Instrument(
            id=instrument_id, underlying=tokens[0], kind=FUTURE, maturity=maturity
        )

    if len(tokens) == 4:
        maturity = _parse_maturity(tokens[1], instrument_id)
        try:
            strike = float(tokens[2])
        except ValueError as exc:
            raise ParseError(f"unparseable strike {tokens[2]!r} in {instrument_id!r}") from exc
        if strike <= 0:
            raise ParseError(f"non-positive strike {tokens[2]!r} in {instrument_id!r}")
        if tokens[3] not in ("C", "P"):
            raise ParseError(f"unknown option type {tokens[3]!r} in {instrument_id!r}")
        return Instrument(
            id=instrument_id,
            underlying=tokens[0],
            kind=OPTION,
            maturity=maturity,
            strike=strike,
            option_type="call" if tokens[3] == "C" else "put",
        )

    raise ParseError(f"bad token count ({len(tokens)}) in {instrument_id!r}")


def format_instrument(instrument: Instrument) -> str:
    """Render the canonical identifier (inverse of :func:`parse_instrument`)."""
    if instrument.kind == INDEX:
        return instrument.underlying
    assert instrument.maturity is not None
    mat = (
        f"{instrument.maturity.day}"
        f"{_MONTHS_INV[instrument.maturity.month]}"
        f"{instrument.maturity.year % 100:02d}"
    )
    if instrument.kind == FUTURE:
        return f"{instrument.underlying}-{mat}"
    strike = instrument.strike
    strike_txt = f"{strike:g}" if strike is not None else ""
    side = "C" if instrument.option_type == "call" else "P"
    return f"{instrument.underlying}-{mat}-{strike_txt}-{side}"
