"""Tick ingestion, TWAP tables, caches and date-partitioned storage."""

from cryptovar.tickengine.cache import InferenceCache
from cryptovar.tickengine.hdb import PartitionedStore, day_of_ms, day_start_ms
from cryptovar.tickengine.quotes import IndexQuote, MarketSnapshot, ProductQuote
from cryptovar.tickengine.records import (
    FeedRecord,
    read_feed_file,
    tick_from_dict,
    tick_to_dict,
    write_feed_file,
)
from cryptovar.tickengine.service import TickEngine
from cryptovar.tickengine.subscribers import (
    FUTURE_TWAP,
    INDEX_TWAP,
    OPTION_TWAP,
    TABLES,
    LatestCacheSubscriber,
    OlhcBar,
    PriceSubscriber,
    StreamingSubscriber,
    TwapTable,
)
from cryptovar.tickengine.tickerplant import Tickerplant, replay_log

__all__ = [
    "FUTURE_TWAP",
    "FeedRecord",
    "INDEX_TWAP",
    "IndexQuote",
    "InferenceCache",
    "LatestCacheSubscriber",
    "MarketSnapshot",
    "OPTION_TWAP",
    "OlhcBar",
    "PartitionedStore",
    "PriceSubscriber",
    "ProductQuote",
    "StreamingSubscriber",
    "TABLES",
    "TickEngine",
    "Tickerplant",
    "TwapTable",
    "day_of_ms",
    "day_start_ms",
    "read_feed_file",
    "replay_log",
    "tick_from_dict",
    "tick_to_dict",
    "write_feed_file",
]
