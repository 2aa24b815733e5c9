"""Ordinary least squares via normal equations with Cholesky factorization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from cryptovar.errors import SingularDesignError

# Cholesky on X'X squares the condition number, so reject designs whose
# condition number already eats half the double-precision mantissa.
COND_THRESHOLD = 1e10


@dataclass
class OlsFit:
    beta: np.ndarray
    se: np.ndarray
    r2: float
    resid_var: float
    cond: float
    n: int

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=float) @ self.beta


def ols_solve(X: np.ndarray, y: np.ndarray, cond_threshold: float = COND_THRESHOLD) -> OlsFit:
    """Fit ``y = X beta`` minimizing the residual sum of squares.

    Solves the normal equations with a symmetric positive-definite
    factorization. Raises :class:`SingularDesignError` when the design is
    rank deficient or its condition number exceeds ``cond_threshold``.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or len(y) != X.shape[0]:
        raise SingularDesignError("design/response shape mismatch")
    n, k = X.shape
    if n < k:
        raise SingularDesignError(f"underdetermined system ({n} rows, {k} columns)")

    cond = float(np.linalg.cond(X))
    if not np.isfinite(cond) or cond > cond_threshold:
        raise SingularDesignError(f"design condition number {cond:.3g} above threshold")

    xtx = X.T @ X
    xty = X.T @ y
    try:
        factor = cho_factor(xtx, lower=True)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - cond check catches first
        raise SingularDesignError("normal equations not positive definite") from exc
    beta = cho_solve(factor, xty)

    resid = y - X @ beta
    rss = float(resid @ resid)
    dof = max(n - k, 1)
    resid_var = rss / dof
    xtx_inv = cho_solve(factor, np.eye(k))
    se = np.sqrt(np.maximum(resid_var * np.diag(xtx_inv), 0.0))
    tss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - rss / tss if tss > 0 else 1.0
    return OlsFit(beta=beta, se=se, r2=r2, resid_var=resid_var, cond=cond, n=n)
