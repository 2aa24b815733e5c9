"""Real-time Value-at-Risk engine for crypto derivative portfolios."""

__version__ = "0.1.0"
