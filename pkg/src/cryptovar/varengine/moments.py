"""Central moments of the quadratic portfolio-return form.

For R ~ N(0, Sigma) and r_p = d'R + 0.5 R'G R + c (G diagonal), with
A = G Sigma:

    mu1 = 0.5 tr(A) + c
    mu2 = d'Sigma d + 0.5 tr(A^2)
    mu3 = 3 d'Sigma A d + tr(A^3)
    mu4 = 12 d'Sigma A^2 d + 3 tr(A^4) + 3 mu2^2

Trace powers are traces of matrix powers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from cryptovar.errors import ContractViolation, InvalidMomentsError
from cryptovar.models.psd import CovarianceForecast
from cryptovar.varengine.mapping import MappedCoefficients


@dataclass(frozen=True)
class Moments:
    mu1: float
    mu2: float
    mu3: float
    mu4: float
    skew: float
    kurt: float

    @property
    def sigma_v(self) -> float:
        return math.sqrt(self.mu2)


def central_moments(
    coeffs: MappedCoefficients,
    forecast: CovarianceForecast,
    tau_days: float,
) -> Moments:
    """First four central moments plus skewness and kurtosis.

    Raises :class:`InvalidMomentsError` when mu2 is not positive (zero
    market variance or an unrepaired covariance), which callers treat as a
    signal to repair the forecast upstream.
    """
    if coeffs.syms != forecast.syms:
        raise ContractViolation(
            f"symbol mismatch between mapping {coeffs.syms} and forecast {forecast.syms}"
        )
    sigma = np.asarray(forecast.matrix, dtype=float)
    d = coeffs.delta
    A = coeffs.gamma_diag[:, None] * sigma  # G @ Sigma without forming G

    quad_lin = float(d @ sigma @ d)
    A2 = A @ A
    tr_a = float(np.trace(A))
    tr_a2 = float(np.trace(A2))
    tr_a3 = float(np.trace(A2 @ A))
    tr_a4 = float(np.trace(A2 @ A2))

    # d' Sigma (A^k) d terms: Sigma @ A = (Sigma G) Sigma is symmetric-friendly
    sigma_a = sigma @ A
    mu1 = 0.5 * tr_a + coeffs.theta_drift(tau_days)
    mu2 = quad_lin + 0.5 * tr_a2
    mu3 = 3.0 * float(d @ sigma_a @ d) + tr_a3
    mu4 = 12.0 * float(d @ sigma_a @ A @ d) + 3.0 * tr_a4 + 3.0 * mu2 * mu2

    if mu2 <= 0.0 or not math.isfinite(mu2):
        raise InvalidMomentsError(f"non-positive portfolio variance mu2={mu2:g}")
    skew = mu3 / mu2**1.5
    kurt = mu4 / (mu2 * mu2)
    if kurt < skew * skew + 1.0 - 1e-9:
        raise InvalidMomentsError(
            f"Pearson bound violated (K={kurt:g} < S^2+1={skew * skew + 1.0:g})"
        )
    return Moments(mu1=mu1, mu2=mu2, mu3=mu3, mu4=mu4, skew=skew, kurt=kurt)
