"""Conversion laws from divergence-based privacy to (eps, delta)-DP.

A law ``Delta <= rho  =>  Delta^eps <= delta`` is sound exactly when the
privacy region of ``Delta`` at ``rho`` sits inside the DP region of
``(eps, delta)``; :func:`divkit.regions.region_contains_region` checks that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from divkit.core import Dist
from divkit.divergences import DivergenceSpec, eps_divergence, evaluate
from divkit.errors import DomainError, NumericError, SamplingError
from divkit.regions import hellinger_lower, renyi_lower_y
from divkit.sampling import random_pair

METHODS = ("mironov", "refined", "tangent_numeric", "hellinger")


@dataclass(frozen=True)
class ConversionResult:
    method: str
    eps: float
    delta: float
    aux: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"method": self.method, "eps": self.eps, "delta": self.delta, "aux": dict(self.aux)}


def _check_rdp(alpha: float, rho: float, delta: float) -> None:
    if not 1 < alpha < math.inf:
        raise DomainError(f"alpha must lie in (1, inf), got {alpha}")
    if not 0 <= rho < math.inf:
        raise DomainError(f"rho must be finite and non-negative, got {rho}")
    if not 0 < delta < 1:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")


def rdp_to_dp_mironov(alpha: float, rho: float, delta: float) -> ConversionResult:
    """``eps = rho - log(delta) / (alpha - 1)``."""
    _check_rdp(alpha, rho, delta)
    return ConversionResult("mironov", rho - math.log(delta) / (alpha - 1.0), delta)


def rdp_to_dp_refined(alpha: float, rho: float, delta: float) -> ConversionResult:
    """``eps = rho + log((alpha-1)/alpha) - (log(delta) + log(alpha)) / (alpha - 1)``.

    The DP line is tangent to the relaxed curve ``1 - x = (e^rho y)^((alpha-1)/alpha)``
    at ``y = t``; ``aux['t_in_range']`` reports whether that tangency lies in (0, 1).
    """
    _check_rdp(alpha, rho, delta)
    eps = rho + math.log((alpha - 1.0) / alpha) - (math.log(delta) + math.log(alpha)) / (alpha - 1.0)
    log_t = (alpha / (alpha - 1.0)) * (math.log(delta * alpha) - (alpha - 1.0) / alpha * rho)
    t = math.exp(log_t)
    return ConversionResult("refined", eps, delta, {"t": t, "t_in_range": bool(0.0 < t < 1.0)})


def _renyi_slope(alpha: float, x: float, y: float) -> float:
    """dy/dx along the Renyi boundary, by implicit differentiation.

    Written through ``r = (x/(1-x))^(a-1) ((1-y)/y)^(1-a)`` so that neither
    branch term is formed explicitly (they overflow for tiny y).
    """
    if x <= 0.0:
        return -alpha * y / (alpha - 1.0)
    log_r = (alpha - 1.0) * (math.log(x) - math.log1p(-x) - math.log1p(-y) + math.log(y))
    r = math.exp(log_r) if log_r < 700 else math.inf
    num = alpha * (r - 1.0)
    den = (alpha - 1.0) * (r * x / (1.0 - y) - (1.0 - x) / y)
    return -num / den


def _renyi_lower_scalar(alpha: float, rho: float, x: float) -> float:
    """Scalar twin of :func:`divkit.regions.renyi_lower_y` (the tangent search calls it often)."""
    if x >= 1.0:
        return 0.0
    log_target = rho * (alpha - 1.0)
    lx = math.log(x) if x > 0 else -math.inf
    l1x = math.log1p(-x)

    def member(y: float) -> bool:
        if y <= 0.0:
            return False
        a = math.exp(alpha * lx + (1 - alpha) * math.log1p(-y)) if x > 0 and y < 1 else 0.0
        e = alpha * l1x + (1 - alpha) * math.log(y)
        if e > 700:
            return False
        return a + math.exp(e) <= math.exp(log_target)

    lo, hi = 0.0, 1.0 - x
    while True:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            return hi
        if member(mid):
            hi = mid
        else:
            lo = mid


def _tangent_intercept(alpha: float, rho: float, x0: float) -> tuple[float, float, float]:
    """x-intercept of the boundary tangent at ``x0``, with the boundary y and slope there."""
    y0 = _renyi_lower_scalar(alpha, rho, x0)
    slope = _renyi_slope(alpha, x0, y0)
    return x0 - y0 / slope, y0, slope


def rdp_to_dp_tangent(
    alpha: float, rho: float, delta: float, grid: int = 4096, tol: float = 1e-8
) -> ConversionResult:
    """Smallest eps whose DP lower line supports the exact Renyi region boundary.

    The DP line ``x + e^eps y = 1 - delta`` must touch the convex lower branch
    of the Renyi region. Its x-intercept is ``1 - delta``; the x-intercept of
    the boundary tangent grows monotonically with the tangency point, so the
    tangency point is found by bisection. If even the tangent at ``x = 0``
    reaches past ``1 - delta``, the line pivots on the corner ``(0, e^-rho)``.
    """
    _check_rdp(alpha, rho, delta)
    target = 1.0 - delta
    corner_intercept = (alpha - 1.0) / alpha
    if target <= corner_intercept:
        x0, y0 = 0.0, math.exp(-rho)
        eps = rho + math.log(target)
        slope = -math.exp(-eps)
    else:
        lo, hi = 0.0, 1.0 - 1e-15
        hi_icpt, _, _ = _tangent_intercept(alpha, rho, hi)
        if not hi_icpt >= target:
            raise NumericError(
                f"tangent search bracket failed: intercept {hi_icpt!r} at x={hi!r} below target {target!r}"
            )
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if not lo < mid < hi:
                break
            icpt, _, _ = _tangent_intercept(alpha, rho, mid)
            if icpt < target:
                lo = mid
            else:
                hi = mid
        x0 = hi
        _, y0, slope = _tangent_intercept(alpha, rho, x0)
        eps = -math.log(-slope)

    # verify: the line supports the boundary and reproduces delta
    achieved = 1.0 - x0 - math.exp(eps) * y0
    xs = np.linspace(0.0, 1.0, grid)
    curve = renyi_lower_y(alpha, rho, xs)
    curve = np.where(xs >= 1.0, 0.0, curve)
    line = (1.0 - delta - xs) * math.exp(-eps)
    support = float(np.min(curve - line))
    if abs(achieved - delta) > tol or support < -tol:
        raise NumericError(
            f"tangent check failed: achieved delta {achieved!r} (want {delta!r}), support gap {support!r}"
        )
    aux = {"t": x0, "y": y0, "slope": slope, "achieved_delta": achieved, "support_gap": support}
    return ConversionResult("tangent_numeric", eps, delta, aux)


def rdp_to_dp(alpha: float, rho: float, delta: float, method: str = "refined") -> ConversionResult:
    if method == "mironov":
        return rdp_to_dp_mironov(alpha, rho, delta)
    if method == "refined":
        return rdp_to_dp_refined(alpha, rho, delta)
    if method in ("tangent", "tangent_numeric"):
        return rdp_to_dp_tangent(alpha, rho, delta)
    raise DomainError(f"unknown conversion method {method!r}")


# ------------------------------------------------------------- Hellinger


def _hd_f(rho: float, x: float) -> float:
    return (1 - rho) ** 2 * (1 - 2 * x) + x - 2 * (1 - rho) * math.sqrt(rho * (2 - rho) * x * (1 - x))


def _hd_dfdx(rho: float, x: float) -> float:
    c = (1 - rho) * math.sqrt(rho * (2 - rho))
    return 1 - 2 * (1 - rho) ** 2 - c * (1 - 2 * x) / math.sqrt(x * (1 - x))


def hellinger_to_dp(eps: float, rho: float) -> ConversionResult:
    """``delta(eps, rho) = 1 - t - f(t)/g(t)``: the DP line tangent to the Hellinger boundary.

    ``f`` is the lower boundary of the Hellinger region and ``g = -df/dx`` its
    slope magnitude, so ``e^eps = 1/g(t)`` at the tangency point ``t``.
    """
    if not 0 <= eps < math.inf:
        raise DomainError(f"eps must be finite and non-negative, got {eps}")
    if rho == 0:
        raise DomainError("rho = 0 forces mu1 = mu2, which is (eps, 0)-DP for every eps")
    if not 0 < rho < 1:
        raise DomainError(f"rho must lie in (0, 1), got {rho}")
    c = (1 - rho) * math.sqrt(rho * (2 - rho))
    z = (math.exp(-eps) - 2 * (1 - rho) ** 2 + 1) / c
    w = z * z + 4
    t = (w - z * math.sqrt(w)) / (2 * w)
    f = _hd_f(rho, t)
    dfdx = _hd_dfdx(rho, t)
    g = -dfdx
    delta = 1 - t - f / g
    aux = {"t": t, "z": z, "f": f, "g": g, "dfdx": dfdx}
    return ConversionResult("hellinger", eps, delta, aux)


def hellinger_tangency_residual(eps: float, rho: float, delta: float, grid: int = 20001) -> float:
    """``min_x (boundary(x) - line(x))`` over ``[0, (1-rho)^2]``; zero for an exact tangent."""
    xs = np.linspace(0.0, (1 - rho) ** 2, grid)
    line = (1 - delta - xs) * math.exp(-eps)
    return float(np.min(hellinger_lower(rho, xs) - line))


# --------------------------------------------------------- falsification


@dataclass(frozen=True)
class FalsificationResult:
    ok: bool
    accepted: int
    attempts: int
    seed: int
    worst_value: float
    worst_pair: Optional[tuple[Dist, Dist]] = None

    def to_dict(self) -> dict:
        out = {
            "ok": self.ok,
            "accepted": self.accepted,
            "attempts": self.attempts,
            "seed": self.seed,
            "worst_value": self.worst_value,
        }
        if self.worst_pair is not None:
            out["mu1"] = self.worst_pair[0].to_dict()
            out["mu2"] = self.worst_pair[1].to_dict()
        return out


def divergence_to_dp_check(
    spec: DivergenceSpec,
    rho: float,
    eps: float,
    delta: float,
    trials: int,
    seed: int = 0,
    max_size: int = 8,
) -> FalsificationResult:
    """Try to falsify ``spec <= rho  =>  Delta^eps <= delta`` on random pairs.

    Draws pairs on 2..``max_size`` points (trial ``i`` uses the generator
    seeded by ``(seed, i)``), keeps those meeting the premise and stops at the
    first one breaking the conclusion, or after ``trials`` accepted pairs.
    """
    if trials < 1:
        raise DomainError("trials must be >= 1")
    accepted = 0
    worst, worst_pair = -math.inf, None
    attempt = 0
    for attempt in range(100 * trials):
        rng = np.random.default_rng([seed, attempt])
        n = int(rng.integers(2, max_size + 1))
        mu1, mu2 = random_pair(rng, n)
        if not evaluate(spec, mu1, mu2) <= rho:
            continue
        accepted += 1
        value = eps_divergence(eps, mu1, mu2)
        if value > worst:
            worst, worst_pair = value, (mu1, mu2)
        if value > delta:
            return FalsificationResult(False, accepted, attempt + 1, seed, value, (mu1, mu2))
        if accepted >= trials:
            break
    if accepted == 0:
        raise SamplingError(f"no pair with {spec} <= {rho} found in {100 * trials} draws")
    return FalsificationResult(True, accepted, attempt + 1, seed, worst, worst_pair)
