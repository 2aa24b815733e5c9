"""Standard-normal inverse CDF and the Cornish-Fisher quantile expansion."""

from __future__ import annotations

import math

from cryptovar.errors import ValidationError

# Acklam's rational approximation coefficients for the inverse normal CDF.
_A = (
    -3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
    1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00,
)
_B = (
    -5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
    6.680131188771972e01, -1.328068155288572e01,
)
_C = (
    -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
    -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00,
)
_D = (
    7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
    3.754408661907416e00,
)
_P_LOW = 0.02425


def _norm_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def inv_norm_cdf(p: float) -> float:
    """Inverse standard-normal CDF (rational approximation + one refinement).

    Absolute error is far below the 1e-9 contract across (0, 1).
    """
    if not 0.0 < p < 1.0:
        raise ValidationError(f"probability {p} outside (0, 1)")
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        x = (((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / (
            (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        )
    elif p <= 1.0 - _P_LOW:
        q = p - 0.5
        r = q * q
        x = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q / (
            ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
        )
    else:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        x = -(((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / (
            (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        )
    # one Halley step against the exact CDF
    err = _norm_cdf(x) - p
    u = err * math.sqrt(2.0 * math.pi) * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


def cornish_fisher_z(skew: float, kurt: float, alpha: float) -> float:
    """Standardized alpha-quantile adjusted for skewness and kurtosis.

    With skew 0 and kurtosis 3 this reduces exactly to the Gaussian
    quantile z_alpha.
    """
    z = inv_norm_cdf(alpha)
    z2 = z * z
    z3 = z2 * z
    return (
        z
        + (z2 - 1.0) * skew / 6.0
        + (z3 - 3.0 * z) * (kurt - 3.0) / 24.0
        - (2.0 * z3 - 5.0 * z) * skew * skew / 36.0
    )


def cf_validity(skew: float, excess_kurt: float) -> bool:
    """Domain-of-validity check for a monotonic Cornish-Fisher quantile.

    True iff S^2/9 - 4*(K/8 - S^2/6)*(1 - K/8 - 5 S^2/36) <= 0 with K the
    excess kurtosis.
    """
    s2 = skew * skew
    k8 = excess_kurt / 8.0
    value = s2 / 9.0 - 4.0 * (k8 - s2 / 6.0) * (1.0 - k8 - 5.0 * s2 / 36.0)
    return value <= 0.0
