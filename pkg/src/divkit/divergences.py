"""Closed-form divergences between finite distributions.

All logarithms are natural. The array kernels (``*_arrays``) work along the
last axis so that the cut enumerator can evaluate thousands of pushforwards
at once; the public functions take :class:`~divkit.core.Dist` pairs.

Zero conventions used in every sum:

* a term with ``mu1(x) == 0`` contributes nothing;
* a term with ``mu1(x) > 0 == mu2(x)`` contributes the weight's recession
  slope times ``mu1(x)`` (``+inf`` for Renyi and KL).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import logsumexp

from divkit import _enum
from divkit.core import Dist
from divkit.errors import DomainError

FAMILIES = ("eps", "renyi", "kl", "max", "tv", "hellinger", "fdiv", "fsup")


@dataclass(frozen=True)
class WeightFn:
    """Convex weight ``f`` of an f-divergence.

    ``slope_at_inf`` is ``lim_{s->inf} f(s)/s``; it fixes the contribution
    ``lim_{t->0+} t f(a/t) = a * slope_at_inf`` of points where ``mu2`` is 0.
    ``f`` must accept numpy arrays.
    """

    name: str
    f: Callable[[np.ndarray], np.ndarray]
    slope_at_inf: float

    @classmethod
    def power(cls, alpha: float) -> "WeightFn":
        return cls(f"t^{alpha:g}", lambda t: np.power(t, alpha), math.inf)

    @classmethod
    def hellinger(cls) -> "WeightFn":
        return cls("sqrt(t)-1", lambda t: np.sqrt(t) - 1.0, 0.0)

    @classmethod
    def total_variation(cls) -> "WeightFn":
        return cls("|t-1|/2", lambda t: np.abs(t - 1.0) / 2.0, 0.5)

    @classmethod
    def kl(cls) -> "WeightFn":
        return cls("t*log(t)", lambda t: np.where(t > 0, t * np.log(np.where(t > 0, t, 1.0)), 0.0), math.inf)

    def midpoint_convexity_check(self, trials: int = 1000, seed: int = 0, hi: float = 10.0) -> bool:
        """Randomised sanity check of ``f((a+b)/2) <= (f(a)+f(b))/2``; never enforced."""
        rng = np.random.default_rng(seed)
        a, b = rng.uniform(0.0, hi, size=(2, trials))
        lhs = np.asarray(self.f((a + b) / 2.0), dtype=float)
        rhs = (np.asarray(self.f(a), dtype=float) + np.asarray(self.f(b), dtype=float)) / 2.0
        return bool(np.all(lhs <= rhs + 1e-12 * (1.0 + np.abs(rhs))))


@dataclass(frozen=True)
class QuasiConvexFn:
    """``F: [0,1]^(2k) -> [0, inf]``, called as ``F(p_1..p_k, q_1..q_k)``.

    With ``vectorized=True`` the evaluator receives 2k equal-length arrays and
    must return an array; otherwise it is called once per partition.
    """

    arity: int
    evaluator: Callable[..., float]
    quasi_convex: bool = True
    vectorized: bool = False
    name: str = "F"

    def __post_init__(self):
        if self.arity < 1:
            raise DomainError("QuasiConvexFn arity must be >= 1")


@dataclass(frozen=True)
class DivergenceSpec:
    """A divergence family plus its parameter (``eps`` or ``alpha``)."""

    family: str
    param: Optional[float] = None
    weight: Optional[WeightFn] = None
    fn: Optional[QuasiConvexFn] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown divergence family {self.family!r}")
        if self.family == "eps" and not (self.param is not None and self.param >= 0 and math.isfinite(self.param)):
            raise DomainError(f"eps must be a finite non-negative number, got {self.param!r}")
        if self.family == "renyi" and not (self.param is not None and 1 < self.param < math.inf):
            raise DomainError(f"Renyi order must lie in (1, inf), got {self.param!r}")
        if self.family == "fdiv" and self.weight is None:
            raise DomainError("fdiv needs a weight function")
        if self.family == "fsup" and self.fn is None:
            raise DomainError("fsup needs a quasi-convex function")

    @classmethod
    def eps(cls, eps: float) -> "DivergenceSpec":
        return cls("eps", float(eps))

    @classmethod
    def renyi(cls, alpha: float) -> "DivergenceSpec":
        """Order 1 is routed to KL and order infinity to the max divergence."""
        alpha = float(alpha)
        if alpha == 1.0:
            return cls("kl")
        if alpha == math.inf:
            return cls("max")
        return cls("renyi", alpha)

    @classmethod
    def fdiv(cls, weight: WeightFn) -> "DivergenceSpec":
        return cls("fdiv", weight=weight)

    @classmethod
    def fsup(cls, fn: QuasiConvexFn) -> "DivergenceSpec":
        return cls("fsup", fn=fn)

    @classmethod
    def parse(cls, text: str) -> "DivergenceSpec":
        """Parse the CLI syntax: ``eps:0.67``, ``renyi:2``, ``kl``, ``max``, ``tv``, ``hellinger``."""
        name, _, arg = text.strip().partition(":")
        name = name.lower()
        if name in ("kl", "max", "tv", "hellinger"):
            if arg:
                raise DomainError(f"{name} takes no parameter")
            return cls(name)
        if name in ("eps", "renyi"):
            try:
                value = float(arg)
            except ValueError:
                raise DomainError(f"{name} needs a numeric parameter, got {arg!r}") from None
            return cls.eps(value) if name == "eps" else cls.renyi(value)
        raise DomainError(f"cannot parse divergence {text!r}")

    def __str__(self) -> str:
        if self.family in ("eps", "renyi"):
            return f"{self.family}:{self.param:g}"
        if self.family == "fdiv":
            return f"fdiv[{self.weight.name}]"
        if self.family == "fsup":
            return f"fsup[{self.fn.name}/{self.fn.arity}]"
        return self.family

    @property
    def relabel_invariant(self) -> bool:
        """True when the value ignores how outcomes are named, so partitions suffice."""
        return self.family != "fsup"

    @property
    def natural_arity(self) -> Optional[int]:
        return self.fn.arity if self.family == "fsup" else None


def _same_space(mu1: Dist, mu2: Dist) -> None:
    if mu1.labels != mu2.labels:
        raise DomainError(f"distributions live on different label sets: {mu1.labels} vs {mu2.labels}")


# ----------------------------------------------------------------- kernels


def eps_arrays(eps: float, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return np.maximum(p - math.exp(eps) * q, 0.0).sum(axis=-1)


def renyi_arrays(alpha: float, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    # log-sum-exp of the log terms: the terms themselves overflow once q is tiny
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = alpha * np.log(p) + (1.0 - alpha) * np.log(q)
    logs = np.where(p > 0, logs, -np.inf)
    logs = np.where((p > 0) & (q <= 0), np.inf, logs)
    with np.errstate(invalid="ignore"):
        total = logsumexp(logs, axis=-1)
    total = np.where(np.any(np.isposinf(logs), axis=-1), np.inf, total)
    out = np.maximum(total / (alpha - 1.0), 0.0)
    # identical rows are exactly 0, not a rounding residue of log(sum p)
    return np.where(np.all(p == q, axis=-1), 0.0, out)


def kl_arrays(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = p * (np.log(p) - np.log(q))
    terms = np.where(p > 0, terms, 0.0)
    terms = np.where((p > 0) & (q <= 0), np.inf, terms)
    return np.maximum(terms.sum(axis=-1), 0.0)


def max_arrays(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.log(p) - np.log(q)
    logs = np.where(p > 0, logs, -np.inf)
    logs = np.where((p > 0) & (q <= 0), np.inf, logs)
    return np.maximum(logs.max(axis=-1), 0.0)


def tv_arrays(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return 0.5 * np.abs(p - q).sum(axis=-1)


def hellinger_arrays(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return np.clip(1.0 - np.sqrt(p * q).sum(axis=-1), 0.0, 1.0)


def fdiv_arrays(weight: WeightFn, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    pos = q > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(pos, p / np.where(pos, q, 1.0), 0.0)
        inner = q * np.asarray(weight.f(ratio), dtype=float)
        tail = np.where(p > 0, p * weight.slope_at_inf, 0.0)
    return np.where(pos, inner, tail).sum(axis=-1)


def fsup_arrays(fn: QuasiConvexFn, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Supremum of F over ordered partitions, for a batch of (p, q) rows."""
    p = np.atleast_2d(p)
    q = np.atleast_2d(q)
    out = np.array([_fsup_single(fn, pi, qi)[0] for pi, qi in zip(p, q)])
    return out


def evaluate_arrays(spec: DivergenceSpec, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Evaluate ``spec`` row-wise on stacked probability vectors."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    fam = spec.family
    if fam == "eps":
        return eps_arrays(spec.param, p, q)
    if fam == "renyi":
        return renyi_arrays(spec.param, p, q)
    if fam == "kl":
        return kl_arrays(p, q)
    if fam == "max":
        return max_arrays(p, q)
    if fam == "tv":
        return tv_arrays(p, q)
    if fam == "hellinger":
        return hellinger_arrays(p, q)
    if fam == "fdiv":
        return fdiv_arrays(spec.weight, p, q)
    return fsup_arrays(spec.fn, p, q)


# ------------------------------------------------------------ public ops


def eps_divergence(eps: float, mu1: Dist, mu2: Dist) -> float:
    """``sup_S mu1(S) - e^eps mu2(S)``, attained by ``S = {mu1 > e^eps mu2}``."""
    if eps < 0:
        raise DomainError(f"eps must be non-negative, got {eps}")
    _same_space(mu1, mu2)
    return float(eps_arrays(eps, mu1.array, mu2.array))


def eps_divergence_bruteforce(eps: float, mu1: Dist, mu2: Dist) -> float:
    """Subset enumeration of the same supremum; exponential, kept as an oracle."""
    _same_space(mu1, mu2)
    n = len(mu1)
    if n > 24:
        raise DomainError("subset enumeration is limited to 24 outcomes")
    p, q = mu1.array, mu2.array
    best = 0.0
    scale = math.exp(eps)
    for maps in _enum.labeled_maps(n, 2):
        mask = maps.astype(bool)
        best = max(best, float((mask @ p - scale * (mask @ q)).max()))
    return best


def renyi(alpha: float, mu1: Dist, mu2: Dist) -> float:
    if not alpha > 1:
        raise DomainError(f"Renyi order must exceed 1 (use kl for order 1), got {alpha}")
    _same_space(mu1, mu2)
    if alpha == math.inf:
        return max_divergence(mu1, mu2)
    return float(renyi_arrays(alpha, mu1.array, mu2.array))


def kl(mu1: Dist, mu2: Dist) -> float:
    _same_space(mu1, mu2)
    return float(kl_arrays(mu1.array, mu2.array))


def max_divergence(mu1: Dist, mu2: Dist) -> float:
    _same_space(mu1, mu2)
    return float(max_arrays(mu1.array, mu2.array))


def total_variation(mu1: Dist, mu2: Dist) -> float:
    _same_space(mu1, mu2)
    return float(tv_arrays(mu1.array, mu2.array))


def hellinger(mu1: Dist, mu2: Dist) -> float:
    _same_space(mu1, mu2)
    return float(hellinger_arrays(mu1.array, mu2.array))


def f_divergence(weight: WeightFn, mu1: Dist, mu2: Dist) -> float:
    """``sum_x mu2(x) f(mu1(x)/mu2(x))``. Convexity of ``weight`` is the caller's promise."""
    _same_space(mu1, mu2)
    return float(fdiv_arrays(weight, mu1.array, mu2.array))


def _fsup_single(fn: QuasiConvexFn, p: np.ndarray, q: np.ndarray):
    k = fn.arity
    best, best_map = -math.inf, None
    for maps in _enum.labeled_maps(len(p), k):
        bp = _enum.block_masses(maps, p, k)
        bq = _enum.block_masses(maps, q, k)
        if fn.vectorized:
            vals = np.asarray(fn.evaluator(*bp.T, *bq.T), dtype=float)
        else:
            vals = np.array([fn.evaluator(*a, *b) for a, b in zip(bp.tolist(), bq.tolist())], dtype=float)
        i = int(np.argmax(vals))
        if vals[i] > best:
            best, best_map = float(vals[i]), maps[i]
    return best, best_map


def f_sup_divergence(fn: QuasiConvexFn, mu1: Dist, mu2: Dist) -> float:
    """Supremum of ``F(mu1(A_1..A_k), mu2(A_1..A_k))`` over ordered k-partitions (empty blocks allowed)."""
    _same_space(mu1, mu2)
    return _fsup_single(fn, mu1.array, mu2.array)[0]


def evaluate(spec: DivergenceSpec, mu1: Dist, mu2: Dist) -> float:
    """Dispatch ``spec`` to the matching closed form."""
    fam = spec.family
    if fam == "eps":
        return eps_divergence(spec.param, mu1, mu2)
    if fam == "renyi":
        return renyi(spec.param, mu1, mu2)
    if fam == "kl":
        return kl(mu1, mu2)
    if fam == "max":
        return max_divergence(mu1, mu2)
    if fam == "tv":
        return total_variation(mu1, mu2)
    if fam == "hellinger":
        return hellinger(mu1, mu2)
    if fam == "fdiv":
        return f_divergence(spec.weight, mu1, mu2)
    return f_sup_divergence(spec.fn, mu1, mu2)
