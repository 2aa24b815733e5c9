"""Exception hierarchy shared across the engine."""


class CryptoVarError(Exception):
    """Base class for all engine errors."""


class ParseError(CryptoVarError):
    """Malformed instrument identifier or wire record."""


class ContractViolation(CryptoVarError):
    """An operation was called outside its documented preconditions."""


class DomainError(CryptoVarError):
    """Input values outside the mathematical domain (e.g. non-positive price)."""


class InsufficientDataError(CryptoVarError):
    """Not enough observations to run the requested computation."""


class DegenerateCorrelationError(DomainError):
    """Correlation requested for a leg with zero realized variance."""


class FitError(CryptoVarError):
    """Model estimation failed to converge.

    Carries the best-so-far diagnostics so callers can inspect what the
    optimizer reached before giving up.
    """

    def __init__(self, message: str, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class SingularDesignError(CryptoVarError):
    """Regression design matrix is rank deficient or too ill-conditioned."""


class StaleDataError(CryptoVarError):
    """Market snapshot entry missing or older than the staleness threshold."""

    def __init__(self, instrument: str, message: str | None = None):
        super().__init__(message or f"stale or missing market data for {instrument}")
        self.instrument = instrument


class DegeneratePortfolioError(CryptoVarError):
    """Portfolio empty or with near-zero net value (weights undefined)."""


class InvalidMomentsError(CryptoVarError):
    """Central moments inconsistent (mu2 <= 0 or Pearson bound violated)."""


class UnknownPortfolioError(CryptoVarError):
    """Portfolio id has no positions."""


class ValidationError(CryptoVarError):
    """Request parameters outside their allowed ranges."""
