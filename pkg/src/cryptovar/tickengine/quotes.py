"""Latest-value market snapshot types (shared by cache and mapping)."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class IndexQuote:
    price: float
    time: int


@dataclass(frozen=True)
class ProductQuote:
    mark_price: float
    time: int
    delta: float | None = None
    gamma: float | None = None
    theta: float | None = None
    implied_vol: float | None = None


@dataclass(frozen=True)
class MarketSnapshot:
    """Point-in-time view of the latest-value caches."""

    index: dict[str, IndexQuote] = field(default_factory=dict)
    product: dict[str, ProductQuote] = field(default_factory=dict)
