"""Pure types and functions for instruments, TWAP bars and realized measures."""

from cryptovar.marketdata.bars import (
    DAY_MS,
    MINUTE_MS,
    ReturnSeries,
    Tick,
    TwapBar,
    aggregate_twap,
    align_series,
    log_returns,
    minute_of,
)
from cryptovar.marketdata.instruments import (
    FUTURE,
    INDEX,
    OPTION,
    Instrument,
    format_instrument,
    parse_instrument,
)
from cryptovar.marketdata.realized import (
    RealizedWindow,
    realized_correlation,
    realized_covariance,
    realized_quarticity,
    realized_variance,
)

__all__ = [
    "DAY_MS",
    "MINUTE_MS",
    "FUTURE",
    "INDEX",
    "OPTION",
    "Instrument",
    "RealizedWindow",
    "ReturnSeries",
    "Tick",
    "TwapBar",
    "aggregate_twap",
    "align_series",
    "format_instrument",
    "log_returns",
    "minute_of",
    "parse_instrument",
    "realized_correlation",
    "realized_covariance",
    "realized_quarticity",
    "realized_variance",
]
