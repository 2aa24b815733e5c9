"""Dynamic conditional correlation layered over univariate GARCH(1,1).

Estimation is two-stage: univariate conditional variances first, then the
correlation dynamics (a, b) by quasi-maximum likelihood on the
standardized residuals. The one-step 30-minute covariance forecast is
composed from the variance forecasts and the forecast correlation, then
scaled linearly to the requested horizon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from cryptovar.errors import FitError, InsufficientDataError
from cryptovar.models.garch import GarchParams, conditional_volatility, fit_garch11
from cryptovar.models.optimize import nelder_mead
from cryptovar.models.psd import CovarianceForecast, ensure_psd
from cryptovar.models.ewma import PERIODS_PER_DAY

MAX_ITERATIONS = 2000
LOGLIK_TOL = 1e-8


@dataclass(frozen=True)
class DccParams:
    a: float
    b: float
    sbar: np.ndarray  # unconditional correlation of standardized residuals
    q_last: np.ndarray
    z_last: np.ndarray
    loglik: float
    converged: bool

    def forecast_correlation(self) -> np.ndarray:
        """One-step-ahead correlation matrix."""
        q_next = (
            (1.0 - self.a - self.b) * self.sbar
            + self.a * np.outer(self.z_last, self.z_last)
            + self.b * self.q_last
        )
        d = 1.0 / np.sqrt(np.diag(q_next))
        return q_next * np.outer(d, d)


def _correlation_path(z: np.ndarray, sbar: np.ndarray, a: float, b: float) -> np.ndarray:
    """Stacked pseudo-correlation matrices Q_t, Q_0 = sbar."""
    T, n = z.shape
    outer = np.einsum("ti,tj->tij", z, z)
    driven = (1.0 - a - b) * sbar[None, :, :] + a * outer[:-1]
    q = np.empty((T, n, n))
    q[0] = sbar
    # each matrix element follows the same linear recursion in t
    flat = driven.reshape(T - 1, n * n)
    zi = (b * sbar).reshape(1, n * n)
    q[1:] = lfilter([1.0], [1.0, -b], flat, axis=0, zi=zi)[0].reshape(T - 1, n, n)
    return q


def _neg_quasi_loglik(z: np.ndarray, sbar: np.ndarray, a: float, b: float) -> float:
    q = _correlation_path(z, sbar, a, b)
    diag = np.sqrt(np.einsum("tii->ti", q))
    r = q / (diag[:, :, None] * diag[:, None, :])
    sign, logdet = np.linalg.slogdet(r)
    if not np.all(sign > 0):
        return math.inf
    rinv = np.linalg.inv(r)
    quad = np.einsum("ti,tij,tj->t", z, rinv, z)
    zz = np.einsum("ti,ti->t", z, z)
    ll = -0.5 * np.sum(logdet + quad - zz)
    return float(-ll) if np.isfinite(ll) else math.inf


def fit_dcc(std_residuals: np.ndarray, init: tuple[float, float] = (0.05, 0.90)) -> DccParams:
    """Fit (a, b) correlation dynamics on standardized residuals (T x n)."""
    z = np.asarray(std_residuals, dtype=float)
    if z.ndim != 2 or z.shape[1] < 2:
        raise InsufficientDataError("DCC stage needs residuals for >= 2 symbols")
    if z.shape[0] < 50:
        raise InsufficientDataError("DCC stage needs >= 50 observations")
    sbar = np.corrcoef(z, rowvar=False)

    # perfectly correlated residuals leave the dynamics unidentified: hold
    # the (degenerate) unconditional correlation instead of optimizing
    if np.linalg.eigvalsh(sbar)[0] < 1e-10:
        return DccParams(
            a=0.0,
            b=0.0,
            sbar=sbar,
            q_last=sbar,
            z_last=np.zeros(z.shape[1]),
            loglik=math.nan,
            converged=True,
        )

    def sigmoid(x: float) -> float:
        return 1.0 / (1.0 + math.exp(-x)) if x >= 0 else math.exp(x) / (1.0 + math.exp(x))

    def objective(x: np.ndarray) -> float:
        a, b = sigmoid(x[0]), sigmoid(x[1])
        if a + b >= 1.0 - 1e-9:
            return math.inf
        return _neg_quasi_loglik(z, sbar, a, b)

    x0 = [math.log(init[0] / (1 - init[0])), math.log(init[1] / (1 - init[1]))]
    result = nelder_mead(objective, x0, max_iter=MAX_ITERATIONS, ftol=LOGLIK_TOL)
    a, b = sigmoid(result.x[0]), sigmoid(result.x[1])
    q = _correlation_path(z, sbar, a, b)
    params = DccParams(
        a=a,
        b=b,
        sbar=sbar,
        q_last=q[-1],
        z_last=z[-1],
        loglik=-result.fval,
        converged=result.converged,
    )
    if not result.converged:
        raise FitError("DCC optimizer did not converge", diagnostics=params)
    return params


def fit_dcc_garch(
    returns: dict[str, np.ndarray], dist: str = "student_t"
) -> tuple[dict[str, GarchParams], DccParams | None]:
    """Two-stage DCC-GARCH estimation over per-symbol return arrays."""
    fits: dict[str, GarchParams] = {}
    residuals = []
    syms = sorted(returns)
    for sym in syms:
        r = np.asarray(returns[sym], dtype=float)
        fits[sym] = fit_garch11(r, dist=dist)
        residuals.append(r / conditional_volatility(fits[sym], r))
    if len(syms) < 2:
        return fits, None
    min_len = min(len(r) for r in residuals)
    z = np.column_stack([r[-min_len:] for r in residuals])
    return fits, fit_dcc(z)


def dcc_forecast_covariance(
    garch_fits: dict[str, GarchParams],
    dcc: DccParams | None,
    horizon_days: float,
) -> CovarianceForecast:
    """Compose variance forecasts and forecast correlation into a matrix."""
    syms = tuple(sorted(garch_fits))
    vols = np.array([math.sqrt(garch_fits[s].sigma2_next) for s in syms])
    if len(syms) == 1 or dcc is None:
        corr = np.eye(len(syms))
    else:
        corr = dcc.forecast_correlation()
    matrix = corr * np.outer(vols, vols) * PERIODS_PER_DAY * horizon_days
    repaired, adjusted = ensure_psd(matrix)
    return CovarianceForecast(
        syms=syms,
        matrix=repaired,
        horizon_days=horizon_days,
        model="GARCH",
        psd_adjusted=adjusted,
    )
