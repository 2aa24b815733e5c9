"""Portfolio bookkeeping, greek mapping and the VaR transformation."""

from cryptovar.varengine.engine import MODELS, VarEngine, VaRResult
from cryptovar.varengine.mapping import (
    MappedCoefficients,
    PositionCoefficients,
    adjust_greeks,
    compress_by_underlying,
)
from cryptovar.varengine.moments import Moments, central_moments
from cryptovar.varengine.portfolio import PortfolioBook, Position, extract_indices
from cryptovar.varengine.quantile import cf_validity, cornish_fisher_z, inv_norm_cdf

__all__ = [
    "MODELS",
    "MappedCoefficients",
    "Moments",
    "PortfolioBook",
    "Position",
    "PositionCoefficients",
    "VaRResult",
    "VarEngine",
    "adjust_greeks",
    "central_moments",
    "cf_validity",
    "compress_by_underlying",
    "cornish_fisher_z",
    "extract_indices",
    "inv_norm_cdf",
]
