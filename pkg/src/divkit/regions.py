"""Privacy regions in the (PFA, PMD) square and the hypothesis-testing bridge.

A point ``(x, y)`` is the Type I / Type II error pair of a rejection test:
``x = Pr[mu1 in S]`` and ``y = Pr[mu2 not in S]``. A divergence bounded by
``rho`` confines every such point to its privacy region, and conversely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from divkit import _enum
from divkit.core import Dist
from divkit.divergences import DivergenceSpec, evaluate_arrays
from divkit.errors import DomainError
from divkit.normal import phi, phi_inv

REGION_FAMILIES = ("dp", "renyi", "gauss", "hellinger", "div")
CONTAIN_SLACK = 1e-8


@dataclass(frozen=True)
class ErrorPoint:
    pfa: float
    pmd: float

    def __post_init__(self):
        for v in (self.pfa, self.pmd):
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"error rates must lie in [0, 1], got ({self.pfa}, {self.pmd})")

    def negated(self) -> "ErrorPoint":
        """Error pair of the complementary test."""
        return ErrorPoint(1.0 - self.pfa, 1.0 - self.pmd)


@dataclass(frozen=True)
class RegionSpec:
    """``dp(eps, delta)``, ``renyi(alpha, rho)``, ``gauss(delta)``, ``hellinger(rho)``.

    The extra ``div`` family is the region of an arbitrary divergence,
    ``{(x, y): Delta((1-x, x) || (y, 1-y)) <= rho}``, used for KL, max and TV.
    """

    family: str
    a: float = 0.0
    b: float = 0.0
    div: Optional[DivergenceSpec] = None

    def __post_init__(self):
        fam = self.family
        if fam not in REGION_FAMILIES:
            raise DomainError(f"unknown region family {fam!r}")
        if fam == "dp" and not (self.a >= 0 and 0 <= self.b <= 1):
            raise DomainError(f"dp region needs eps >= 0 and delta in [0, 1], got ({self.a}, {self.b})")
        if fam == "renyi" and not (1 < self.a < math.inf and self.b >= 0):
            raise DomainError(f"renyi region needs alpha > 1 and rho >= 0, got ({self.a}, {self.b})")
        if fam == "gauss" and not self.a >= 0:
            raise DomainError(f"gauss region needs delta >= 0, got {self.a}")
        if fam == "hellinger" and not 0 <= self.a <= 1:
            raise DomainError(f"hellinger region needs rho in [0, 1], got {self.a}")
        if fam == "div" and self.div is None:
            raise DomainError("div region needs a divergence")

    @classmethod
    def dp(cls, eps: float, delta: float) -> "RegionSpec":
        return cls("dp", float(eps), float(delta))

    @classmethod
    def renyi(cls, alpha: float, rho: float) -> "RegionSpec":
        return cls("renyi", float(alpha), float(rho))

    @classmethod
    def gauss(cls, delta: float) -> "RegionSpec":
        return cls("gauss", float(delta))

    @classmethod
    def hellinger(cls, rho: float) -> "RegionSpec":
        return cls("hellinger", float(rho))

    @classmethod
    def of_divergence(cls, spec: DivergenceSpec, rho: float) -> "RegionSpec":
        """The region cut out by ``spec <= rho``, in closed form where one exists."""
        if spec.family == "eps":
            # Delta^eps never exceeds 1, so larger budgets all give the full square
            return cls.dp(spec.param, min(rho, 1.0))
        if spec.family == "renyi":
            return cls.renyi(spec.param, rho)
        if spec.family == "hellinger" and 0 <= rho <= 1:
            return cls.hellinger(rho)
        return cls("div", float(rho), div=spec)

    @classmethod
    def parse(cls, text: str) -> "RegionSpec":
        """CLI syntax: ``dp:0.67,0.05``, ``renyi:2,1.0``, ``gauss:0.5``, ``hellinger:0.1``."""
        name, _, args = text.strip().partition(":")
        try:
            vals = [float(v) for v in args.split(",")] if args else []
        except ValueError:
            raise DomainError(f"cannot parse region parameters in {text!r}") from None
        arity = {"dp": 2, "renyi": 2, "gauss": 1, "hellinger": 1}.get(name.lower())
        if arity is None or len(vals) != arity:
            raise DomainError(f"cannot parse region {text!r}")
        return cls(name.lower(), *vals)

    def __str__(self) -> str:
        if self.family in ("dp", "renyi"):
            return f"{self.family}:{self.a:g},{self.b:g}"
        if self.family == "div":
            return f"div[{self.div}]:{self.a:g}"
        return f"{self.family}:{self.a:g}"


# ------------------------------------------------------------ membership


def _renyi_sum(alpha: float, x, y, xc=None, yc=None):
    """``x^a (1-y)^(1-a) + (1-x)^a y^(1-a)``, with ``0^a * anything = 0`` and ``c * 0^(1-a) = inf`` for ``c > 0``."""
    x, xc, y, yc = _with_complements(x, y, xc, yc)

    def term(u, v):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            t = np.exp(alpha * np.log(u) + (1.0 - alpha) * np.log(v))
        t = np.where(u > 0, t, 0.0)
        return np.where((u > 0) & (v <= 0), np.inf, t)

    return term(x, yc) + term(xc, y)


def _with_complements(x, y, xc=None, yc=None):
    """``(x, 1-x, y, 1-y)`` as arrays; callers holding exact complements pass them in."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xc = 1.0 - x if xc is None else np.asarray(xc, dtype=float)
    yc = 1.0 - y if yc is None else np.asarray(yc, dtype=float)
    return x, xc, y, yc


def _gauss_lower(delta: float, x):
    """``Phi(Phi^-1(1 - x) - delta)``."""
    z = phi_inv(1.0 - np.asarray(x, dtype=float))
    return phi(np.asarray(z) - delta)


def _binary(x, xc, y, yc):
    return np.stack([xc, x], axis=-1), np.stack([y, yc], axis=-1)


def contains_arrays(region: RegionSpec, x, y, xc=None, yc=None) -> np.ndarray:
    """Exact membership test, vectorised; boundary points are members.

    ``xc`` and ``yc`` default to ``1 - x`` and ``1 - y``; pass the exact
    complementary masses when they are known, since ``1 - x`` can round to 0
    while the mass it stands for is positive.
    """
    x, xc, y, yc = _with_complements(x, y, xc, yc)
    fam = region.family
    if fam == "dp":
        scale = math.exp(region.a)
        return (xc <= scale * y + region.b) & (x <= scale * yc + region.b)
    if fam == "renyi":
        return _renyi_sum(region.a, x, y, xc, yc) <= math.exp(region.b * (region.a - 1.0))
    if fam == "gauss":
        lower = phi(np.asarray(phi_inv(xc)) - region.a)
        upper = phi(np.asarray(phi_inv(x)) - region.a)
        return (y >= lower) & (yc >= upper)
    if fam == "hellinger":
        return 1.0 - np.sqrt(x * yc) - np.sqrt(xc * y) <= region.a
    p, q = _binary(x, xc, y, yc)
    return evaluate_arrays(region.div, p, q) <= region.a


def region_contains(region: RegionSpec, point: ErrorPoint) -> bool:
    return bool(contains_arrays(region, point.pfa, point.pmd))


def margin_arrays(region: RegionSpec, x, y, xc=None, yc=None) -> np.ndarray:
    """Signed violation: positive means outside, by that much.

    Units are probability for dp/gauss/hellinger and nats for renyi/div.
    """
    x, xc, y, yc = _with_complements(x, y, xc, yc)
    fam = region.family
    if fam == "dp":
        scale = math.exp(region.a)
        return np.maximum(xc - scale * y, x - scale * yc) - region.b
    if fam == "renyi":
        with np.errstate(divide="ignore"):
            return np.log(_renyi_sum(region.a, x, y, xc, yc)) / (region.a - 1.0) - region.b
    if fam == "gauss":
        lower = phi(np.asarray(phi_inv(xc)) - region.a)
        upper = phi(np.asarray(phi_inv(x)) - region.a)
        return np.maximum(lower - y, upper - yc)
    if fam == "hellinger":
        return 1.0 - np.sqrt(x * yc) - np.sqrt(xc * y) - region.a
    p, q = _binary(x, xc, y, yc)
    return evaluate_arrays(region.div, p, q) - region.a


def region_margin(region: RegionSpec, point: ErrorPoint) -> float:
    return float(margin_arrays(region, point.pfa, point.pmd))


# -------------------------------------------------------------- boundary


def _bisect_lower(member, x: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Smallest y in [0, hi] with ``member(x, y)``, to full float resolution.

    Assumes membership is monotone in y on [0, hi] and that ``hi`` is a member.
    """
    lo = np.zeros_like(x)
    hi = hi.copy()
    inside0 = member(x, lo)
    for _ in range(2200):
        mid = 0.5 * (lo + hi)
        active = (mid > lo) & (mid < hi) & ~inside0
        if not active.any():
            break
        m = member(x, mid)
        hi = np.where(active & m, mid, hi)
        lo = np.where(active & ~m, mid, lo)
    return np.where(inside0, 0.0, hi)


def renyi_lower_y(alpha: float, rho: float, x) -> np.ndarray:
    """Lower branch of ``x^a (1-y)^(1-a) + (1-x)^a y^(1-a) = e^(rho (a-1))`` by bisection."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    region = RegionSpec.renyi(alpha, rho)
    return _bisect_lower(lambda xx, yy: contains_arrays(region, xx, yy), x, 1.0 - x)


def renyi_boundary_residual(alpha: float, rho: float, x, y) -> np.ndarray:
    """Relative residual of the implicit boundary equation."""
    target = math.exp(rho * (alpha - 1.0))
    return np.abs(_renyi_sum(alpha, x, y) - target) / target


def hellinger_lower(rho: float, x):
    """``(1-rho)^2 (1-2x) + x - 2 (1-rho) sqrt(rho (2-rho) x (1-x))``, clipped at 0."""
    x = np.asarray(x, dtype=float)
    f = (1 - rho) ** 2 * (1 - 2 * x) + x - 2 * (1 - rho) * np.sqrt(rho * (2 - rho) * x * (1 - x))
    return np.where(x >= (1 - rho) ** 2, 0.0, np.maximum(f, 0.0))


def _x_intercept(region: RegionSpec) -> float:
    """Smallest x with (x, 0) in the region."""
    fam = region.family
    if fam == "dp":
        return max(0.0, 1.0 - region.b)
    if fam == "hellinger":
        return (1.0 - region.a) ** 2
    if fam in ("gauss", "renyi"):
        return 1.0
    if contains_arrays(region, 0.0, 0.0):
        return 0.0
    lo, hi = 0.0, 1.0
    while True:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            return hi
        if contains_arrays(region, mid, 0.0):
            hi = mid
        else:
            lo = mid


def _snap_inside(region: RegionSpec, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Raise closed-form boundary values until the exact membership test accepts them.

    Rounding in the formula can leave a point a few ulps outside; steps double
    from one ulp so a larger miss is still closed in a bounded number of rounds.
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    y = y.copy()
    step = np.spacing(np.maximum(y, np.finfo(float).tiny))
    for _ in range(80):
        out = ~contains_arrays(region, x, y)
        if not out.any():
            break
        y = np.where(out, np.minimum(y + step, 1.0), y)
        step = np.where(out, 2.0 * step, step)
    return y


def lower_boundary(region: RegionSpec, x) -> np.ndarray:
    """The lower-left boundary ``y(x)`` of a region (the branch below the anti-diagonal).

    Every returned point passes the exact membership test.
    """
    x = np.asarray(x, dtype=float)
    fam = region.family
    if fam == "dp":
        return _snap_inside(region, x, np.maximum(0.0, (1.0 - x - region.b) * math.exp(-region.a)))
    if fam == "gauss":
        return _snap_inside(region, x, np.asarray(_gauss_lower(region.a, x), dtype=float))
    if fam == "hellinger":
        return _snap_inside(region, x, hellinger_lower(region.a, x))
    if fam == "renyi":
        y = renyi_lower_y(region.a, region.b, x)
        return np.where(x >= 1.0, 0.0, y)
    xs = np.atleast_1d(x)
    return _bisect_lower(lambda xx, yy: contains_arrays(region, xx, yy), xs, np.clip(1.0 - xs, 0.0, 1.0))


def region_boundary(region: RegionSpec, n: int) -> list[ErrorPoint]:
    """``n`` points on the lower-left boundary, uniform in x over ``[0, x-intercept]``."""
    if n < 2:
        raise DomainError(f"need at least 2 boundary points, got {n}")
    xs = np.linspace(0.0, _x_intercept(region), n)
    ys = lower_boundary(region, xs)
    return [ErrorPoint(float(x), float(min(max(y, 0.0), 1.0))) for x, y in zip(xs, ys) if np.isfinite(y)]


@dataclass(frozen=True)
class Containment:
    contained: bool
    max_violation: float
    worst: ErrorPoint


def region_contains_region(
    inner: RegionSpec, outer: RegionSpec, n: int = 1024, slack: float = CONTAIN_SLACK
) -> Containment:
    """Grid check that the boundary of ``inner`` lies in ``outer``.

    Both branches are checked: the lower-left one and its image under
    negating the test, ``(x, y) -> (1-x, 1-y)``.
    """
    if n < 16:
        raise DomainError(f"containment grid needs n >= 16, got {n}")
    pts = region_boundary(inner, n)
    bx = np.array([p.pfa for p in pts])
    by = np.array([p.pmd for p in pts])
    # mirrored points carry their exact complements; 1 - (1 - y) loses tiny y
    x = np.concatenate([bx, 1.0 - bx])
    xc = np.concatenate([1.0 - bx, bx])
    y = np.concatenate([by, 1.0 - by])
    yc = np.concatenate([1.0 - by, by])
    m = margin_arrays(outer, x, y, xc, yc)
    i = int(np.argmax(m))
    return Containment(bool(m[i] <= slack), float(m[i]), ErrorPoint(float(x[i]), float(y[i])))


# ---------------------------------------------------- hypothesis testing


def _test_masses(mu1: Dist, mu2: Dist):
    """``mu1(S), mu1(S^c), mu2(S), mu2(S^c)`` for every subset ``S``, plus the masks."""
    if mu1.labels != mu2.labels:
        raise DomainError("distributions live on different label sets")
    n = len(mu1)
    _enum.check_capacity(n, 2)
    masks = np.concatenate(list(_enum.labeled_maps(n, 2))).astype(bool)
    p, q = mu1.array, mu2.array
    return masks @ p, (~masks) @ p, masks @ q, (~masks) @ q, masks


def decision_points(mu1: Dist, mu2: Dist) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(PFA, PMD) of every rejection region ``S``, plus the subset masks.

    Subsets are listed in the lexicographic order of their indicator vectors.
    """
    p_in, p_out, q_in, q_out, masks = _test_masses(mu1, mu2)
    # in / (in + out): a test whose complement carries no mass gets exactly 1, not 1 - ulp
    pfa = p_in / (p_in + p_out)
    pmd = q_out / (q_in + q_out)
    return np.clip(pfa, 0.0, 1.0), np.clip(pmd, 0.0, 1.0), masks


@dataclass(frozen=True)
class HTResult:
    ok: bool
    worst: ErrorPoint
    worst_margin: float
    worst_subset: tuple[str, ...]
    points_checked: int


def ht_check(
    spec: DivergenceSpec, rho: float, mu1: Dist, mu2: Dist, skip_upper: bool = False
) -> HTResult:
    """Do all deterministic tests land in the privacy region of ``spec`` at level ``rho``?

    ``skip_upper`` keeps one test from each complementary pair, the one with
    ``x + y < 1``; the other has the same binary divergence, so the answer
    does not change.
    """
    region = RegionSpec.of_divergence(spec, rho)
    x, xc, yc, y, masks = _test_masses(mu1, mu2)
    if skip_upper:
        # x + y < 1 is mu1(S) - mu2(S) < mu1(S^c) - mu2(S^c); S and S^c swap sides, so
        # exactly one of each pair survives even when rounding blurs the comparison
        a, b = x - yc, xc - y
        keep = (a < b) | ((a == b) & ~masks[:, 0])
        x, xc, y, yc, masks = x[keep], xc[keep], y[keep], yc[keep], masks[keep]
    inside = contains_arrays(region, x, y, xc, yc)
    margins = margin_arrays(region, x, y, xc, yc)
    # rank outside points above inside ones, then by margin
    score = np.where(inside, -np.inf, np.nan_to_num(margins, nan=np.inf, posinf=np.inf))
    if inside.all():
        score = margins
    i = int(np.argmax(score))
    subset = tuple(lab for lab, m in zip(mu1.labels, masks[i]) if m)
    return HTResult(bool(inside.all()), ErrorPoint(float(min(x[i], 1.0)), float(min(y[i], 1.0))), float(margins[i]), subset, len(x))


def gauss_divergence(mu1: Dist, mu2: Dist) -> float:
    """Least ``delta >= 0`` with every test's error pair inside the Gaussian region of ``delta``."""
    x, y, _ = decision_points(mu1, mu2)
    if mu1.probs == mu2.probs:
        return 0.0
    with np.errstate(invalid="ignore"):
        # both branch conditions, as in the membership test; they differ by rounding of 1 - y
        lower = np.asarray(phi_inv(1.0 - x)) - np.asarray(phi_inv(y))
        upper = np.asarray(phi_inv(x)) - np.asarray(phi_inv(1.0 - y))
    need = np.fmax(np.where(np.isnan(lower), -np.inf, lower), np.where(np.isnan(upper), -np.inf, upper))
    return max(0.0, float(need.max()))
