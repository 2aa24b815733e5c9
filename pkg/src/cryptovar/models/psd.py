"""Covariance forecast container and positive semi-definite repair."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from cryptovar.errors import ContractViolation


@dataclass(frozen=True)
class CovarianceForecast:
    """Horizon-scaled covariance matrix over underlying indices."""

    syms: tuple[str, ...]
    matrix: np.ndarray
    horizon_days: float
    model: str
    psd_adjusted: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def variance_of(self, sym: str) -> float:
        i = self.syms.index(sym)
        return float(self.matrix[i, i])


def ensure_psd(matrix: np.ndarray, sym_tol: float = 1e-9) -> tuple[np.ndarray, bool]:
    """Project a symmetric matrix onto the PSD cone, keeping its diagonal.

    Negative eigenvalues are floored at zero and the matrix reassembled;
    the original diagonal is then restored by symmetric rescaling so
    variances survive the repair. Returns (matrix, adjusted_flag).
    """
    matrix = np.asarray(matrix, dtype=float)
    scale = max(1.0, float(np.abs(matrix).max()) if matrix.size else 1.0)
    if matrix.size and float(np.abs(matrix - matrix.T).max()) > sym_tol * scale:
        raise ContractViolation("matrix is not symmetric")
    sym = 0.5 * (matrix + matrix.T)

    eigvals, eigvecs = np.linalg.eigh(sym)
    if eigvals.size == 0 or eigvals[0] >= 0:
        return sym, False

    floored = (eigvecs * np.maximum(eigvals, 0.0)) @ eigvecs.T
    rescale = np.ones(len(sym))
    for i in range(len(sym)):
        if floored[i, i] > 0 and sym[i, i] > 0:
            rescale[i] = np.sqrt(sym[i, i] / floored[i, i])
    repaired = floored * np.outer(rescale, rescale)
    repaired = 0.5 * (repaired + repaired.T)
    return repaired, True
