"""Standard normal CDF and quantile.

``phi`` is scipy's ``ndtr``, accurate to relative precision deep in the
lower tail (going through ``erfc(-x/sqrt 2)`` loses about ``x^2`` ulps).
``phi_inv`` starts from Acklam's rational approximation (relative error
about 1e-9) and takes one Halley step against ``phi``.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import ndtr

_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def phi(x):
    """Standard normal CDF; accepts scalars or arrays, ``phi(+-inf)`` is 1 / 0."""
    out = ndtr(np.asarray(x, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def _acklam(p: float) -> float:
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        return num / den
    if p > 1.0 - _P_LOW:
        q = math.sqrt(-2.0 * math.log1p(-p))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        return -num / den
    q = p - 0.5
    r = q * q
    num = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
    den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
    return num / den


def _phi_inv_scalar(p: float) -> float:
    if math.isnan(p) or p < 0.0 or p > 1.0:
        raise ValueError(f"phi_inv needs p in [0, 1], got {p}")
    if p == 0.0:
        return -math.inf
    if p == 1.0:
        return math.inf
    if p == 0.5:
        return 0.0
    x = _acklam(p)
    # Halley step; work on the smaller tail so the residual keeps its precision
    if p > 0.5:
        e = -(float(ndtr(-x)) - (1.0 - p))
    else:
        e = float(ndtr(x)) - p
    if e == 0.0:
        return x
    # e / pdf(x), in logs: pdf underflows long before the correction does
    log_u = math.log(abs(e)) + 0.5 * math.log(2.0 * math.pi) + 0.5 * x * x
    if log_u > 0.0:
        return x
    u = math.copysign(math.exp(log_u), e)
    return x - u / (1.0 + 0.5 * x * u)


def phi_inv(p):
    """Standard normal quantile; ``phi_inv(0) = -inf`` and ``phi_inv(1) = +inf``."""
    if np.ndim(p) == 0:
        return _phi_inv_scalar(float(p))
    arr = np.asarray(p, dtype=float)
    return np.array([_phi_inv_scalar(v) for v in arr.ravel()]).reshape(arr.shape)
