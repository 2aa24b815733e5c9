"""GARCH(1,1) conditional variance model with Gaussian or Student-t errors.

Returns are assumed to have zero conditional mean; parameters are fitted
by (quasi-)maximum likelihood with the in-house simplex optimizer over
unconstrained transforms (log for omega, logistic for alpha and beta with
an alpha + beta < 1 barrier).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from cryptovar.errors import FitError, InsufficientDataError
from cryptovar.models.optimize import nelder_mead

GAUSSIAN = "gaussian"
STUDENT_T = "student_t"

MIN_OBSERVATIONS = 200
MAX_ITERATIONS = 2000
LOGLIK_TOL = 1e-8
NU_FLOOR = 2.05

_LOG2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class GarchParams:
    """Fitted GARCH(1,1) parameters and end-of-sample state."""

    omega: float
    alpha: float
    beta: float
    dist: str
    nu: float | None
    sigma2_initial: float
    sigma2_next: float  # one-step-ahead conditional variance
    loglik: float
    loglik_initial: float
    iterations: int
    converged: bool

    @property
    def persistence(self) -> float:
        return self.alpha + self.beta

    @property
    def unconditional_variance(self) -> float:
        return self.omega / (1.0 - self.alpha - self.beta)


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def _logit(p: float) -> float:
    return math.log(p / (1.0 - p))


def variance_path(returns: np.ndarray, omega: float, alpha: float, beta: float, sigma2_0: float) -> np.ndarray:
    """Conditional variance series aligned with ``returns`` (index 0 seeded)."""
    n = len(returns)
    out = np.empty(n)
    out[0] = sigma2_0
    if n > 1:
        driven = omega + alpha * returns[:-1] ** 2
        out[1:] = lfilter([1.0], [1.0, -beta], driven, zi=[beta * sigma2_0])[0]
    return out


def _neg_loglik(returns: np.ndarray, omega, alpha, beta, nu, sigma2_0) -> float:
    sigma2 = variance_path(returns, omega, alpha, beta, sigma2_0)
    if not np.all(sigma2 > 0) or not np.all(np.isfinite(sigma2)):
        return math.inf
    z2 = returns**2 / sigma2
    if nu is None:
        ll = -0.5 * np.sum(_LOG2PI + np.log(sigma2) + z2)
    else:
        const = (
            math.lgamma((nu + 1.0) / 2.0)
            - math.lgamma(nu / 2.0)
            - 0.5 * math.log(math.pi * (nu - 2.0))
        )
        ll = np.sum(
            const - 0.5 * np.log(sigma2) - ((nu + 1.0) / 2.0) * np.log1p(z2 / (nu - 2.0))
        )
    return float(-ll) if np.isfinite(ll) else math.inf


def fit_garch11(
    returns: np.ndarray,
    dist: str = GAUSSIAN,
    init: tuple[float, float] = (0.10, 0.80),
    init_nu: float = 8.0,
) -> GarchParams:
    """Fit GARCH(1,1) by quasi-maximum likelihood.

    The initial conditional variance is the sample variance. Raises
    :class:`InsufficientDataError` below 200 observations,
    :class:`FitError` on zero-variance input or non-convergence (the
    latter carries best-so-far diagnostics).
    """
    returns = np.asarray(returns, dtype=float)
    if len(returns) < MIN_OBSERVATIONS:
        raise InsufficientDataError(
            f"GARCH fit needs >= {MIN_OBSERVATIONS} observations, got {len(returns)}"
        )
    if dist not in (GAUSSIAN, STUDENT_T):
        raise ValueError(f"unknown error distribution {dist!r}")
    sample_var = float(np.var(returns))
    if sample_var <= 0.0:
        raise FitError("degenerate return series (zero variance)")

    student = dist == STUDENT_T

    def unpack(x: np.ndarray):
        omega = math.exp(x[0])
        alpha = _sigmoid(x[1])
        beta = _sigmoid(x[2])
        nu = NU_FLOOR + math.exp(x[3]) if student else None
        return omega, alpha, beta, nu

    def objective(x: np.ndarray) -> float:
        try:
            omega, alpha, beta, nu = unpack(x)
        except OverflowError:
            return math.inf
        if alpha + beta >= 1.0 - 1e-9:
            return math.inf
        return _neg_loglik(returns, omega, alpha, beta, nu, sample_var)

    a0, b0 = init
    omega0 = sample_var * (1.0 - a0 - b0)
    x0 = [math.log(omega0), _logit(a0), _logit(b0)]
    if student:
        x0.append(math.log(init_nu - NU_FLOOR))
    loglik_initial = -objective(np.asarray(x0))

    result = nelder_mead(objective, x0, max_iter=MAX_ITERATIONS, ftol=LOGLIK_TOL)
    omega, alpha, beta, nu = unpack(result.x)
    sigma2 = variance_path(returns, omega, alpha, beta, sample_var)
    sigma2_next = omega + alpha * returns[-1] ** 2 + beta * sigma2[-1]
    params = GarchParams(
        omega=omega,
        alpha=alpha,
        beta=beta,
        dist=dist,
        nu=nu,
        sigma2_initial=sample_var,
        sigma2_next=float(sigma2_next),
        loglik=-result.fval,
        loglik_initial=loglik_initial,
        iterations=result.iterations,
        converged=result.converged,
    )
    if not result.converged:
        raise FitError(
            f"GARCH optimizer did not converge in {MAX_ITERATIONS} iterations",
            diagnostics=params,
        )
    return params


def conditional_volatility(params: GarchParams, returns: np.ndarray) -> np.ndarray:
    """In-sample conditional volatility path for standardizing residuals."""
    sigma2 = variance_path(
        np.asarray(returns, dtype=float),
        params.omega,
        params.alpha,
        params.beta,
        params.sigma2_initial,
    )
    return np.sqrt(sigma2)


def simulate_garch11(
    omega: float,
    alpha: float,
    beta: float,
    n: int,
    dist: str = GAUSSIAN,
    nu: float = 8.0,
    seed: int | None = None,
    burn_in: int = 1000,
) -> np.ndarray:
    """Simulate a zero-mean GARCH(1,1) path (unit-variance innovations)."""
    rng = np.random.default_rng(seed)
    total = n + burn_in
    if dist == STUDENT_T:
        z = rng.standard_t(nu, total) * math.sqrt((nu - 2.0) / nu)
    else:
        z = rng.standard_normal(total)
    r = np.empty(total)
    sigma2 = omega / (1.0 - alpha - beta)
    for t in range(total):
        r[t] = math.sqrt(sigma2) * z[t]
        sigma2 = omega + alpha * r[t] ** 2 + beta * sigma2
    return r[burn_in:]
