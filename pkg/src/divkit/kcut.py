"""k-cuts: the best a k-outcome decision rule can do at telling two distributions apart.

The supremum over channels ``X -> prob({1..k})`` is attained on a
deterministic rule (weak Birkhoff-von Neumann plus quasi-convexity), so the
cut is an exact finite maximum over maps ``X -> {0..k-1}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from divkit import _enum
from divkit.core import DeterministicRule, Dist, pushforward
from divkit.divergences import DivergenceSpec, evaluate, evaluate_arrays
from divkit.errors import DomainError

GAP_TOL = 1e-9


@dataclass(frozen=True)
class CutResult:
    k: int
    value: float
    witness: DeterministicRule
    full_value: float
    gap: float

    @property
    def not_k_generated(self) -> bool:
        """True when this pair certifies that the divergence is not k-generated."""
        return self.gap > GAP_TOL

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "value": self.value,
            "full_value": self.full_value,
            "gap": self.gap,
            "witness": self.witness.to_dict(),
            "blocks": self.witness.blocks(),
        }


def _gap(full: float, value: float) -> float:
    if full == value:
        return 0.0
    return full - value


def _cut_labels(k: int) -> tuple[str, ...]:
    return tuple(str(j) for j in range(k))


def _result(spec, k, mu1, mu2, value, best_map, full=None) -> CutResult:
    witness = DeterministicRule.from_indices(mu1.labels, _cut_labels(k), best_map)
    if full is None:
        full = evaluate(spec, mu1, mu2)
    return CutResult(k, float(value), witness, float(full), _gap(full, value))


def k_cut(spec: DivergenceSpec, k: int, mu1: Dist, mu2: Dist) -> CutResult:
    """Exact k-cut by exhaustive enumeration of deterministic rules.

    Relabel-invariant divergences are enumerated over unordered partitions
    (restricted growth strings), anything else over all labelled maps. Ties
    go to the lexicographically least map.
    """
    if mu1.labels != mu2.labels:
        raise DomainError("k_cut needs two distributions on the same labels")
    if k < 1:
        raise DomainError(f"k must be a positive integer, got {k}")
    n = len(mu1)
    p, q = mu1.array, mu2.array
    maps_iter = _enum.partition_maps(n, k) if spec.relabel_invariant else _enum.labeled_maps(n, k)
    best, best_map = -math.inf, None
    for maps in maps_iter:
        vals = evaluate_arrays(spec, _enum.block_masses(maps, p, k), _enum.block_masses(maps, q, k))
        i = int(np.argmax(vals))
        if best_map is None or vals[i] > best:
            best, best_map = float(vals[i]), maps[i]
    return _result(spec, k, mu1, mu2, best, best_map)


def witness_value(spec: DivergenceSpec, result: CutResult, mu1: Dist, mu2: Dist) -> float:
    """Re-evaluate the divergence on the pushforwards through the witness rule."""
    gamma = result.witness.as_channel()
    return evaluate(spec, pushforward(gamma, mu1), pushforward(gamma, mu2))


def _subset_masks(n: int) -> np.ndarray:
    # bit for label 0 is the most significant, matching the map enumeration order
    masks = np.arange(2**n, dtype=np.int64)[:, None]
    return ((masks >> np.arange(n - 1, -1, -1)) & 1).astype(bool)


def _log_renyi_term(alpha: float, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``log(a^alpha b^(1-alpha))`` with ``0^alpha -> -inf`` and ``a > 0, b = 0 -> +inf``."""
    with np.errstate(divide="ignore", invalid="ignore"):
        out = alpha * np.log(a) + (1.0 - alpha) * np.log(b)
    out = np.where(a > 0, out, -np.inf)
    return np.where((a > 0) & (b <= 0), np.inf, out)


def renyi_2cut_closed_form(alpha: float, mu1: Dist, mu2: Dist) -> CutResult:
    """2-cut of Renyi as a supremum over subsets ``S`` of the binary Renyi expression."""
    if not alpha > 1:
        raise DomainError(f"Renyi order must exceed 1, got {alpha}")
    n = len(mu1)
    _enum.check_capacity(n, 2)
    if mu1.labels != mu2.labels:
        raise DomainError("distributions live on different label sets")
    inside = _subset_masks(n)
    outside = ~inside
    p, q = mu1.array, mu2.array
    log_total = np.logaddexp(
        _log_renyi_term(alpha, inside @ p, inside @ q), _log_renyi_term(alpha, outside @ p, outside @ q)
    )
    vals = log_total / (alpha - 1.0)
    i = int(np.argmax(vals))
    spec = DivergenceSpec.renyi(alpha)
    return _result(spec, 2, mu1, mu2, max(float(vals[i]), 0.0), inside[i].astype(int))


def renyi_3cut_closed_form(alpha: float, mu1: Dist, mu2: Dist) -> CutResult:
    """3-cut of Renyi over disjoint pairs ``(S1, S2)``, the third block being the rest."""
    if not alpha > 1:
        raise DomainError(f"Renyi order must exceed 1, got {alpha}")
    if mu1.labels != mu2.labels:
        raise DomainError("distributions live on different label sets")
    n = len(mu1)
    p, q = mu1.array, mu2.array
    best, best_map = -math.inf, None
    for maps in _enum.labeled_maps(n, 3):
        log_total = np.full(len(maps), -np.inf)
        for block in range(3):
            member = maps == block
            log_total = np.logaddexp(log_total, _log_renyi_term(alpha, member @ p, member @ q))
        vals = log_total / (alpha - 1.0)
        i = int(np.argmax(vals))
        if best_map is None or vals[i] > best:
            best, best_map = float(vals[i]), maps[i]
    spec = DivergenceSpec.renyi(alpha)
    return _result(spec, 3, mu1, mu2, max(best, 0.0), best_map)


def generatedness_gap(spec: DivergenceSpec, k: int, mu1: Dist, mu2: Dist) -> CutResult:
    """Full divergence, k-cut and their difference; ``gap > 1e-9`` certifies non-k-generatedness."""
    return k_cut(spec, k, mu1, mu2)


def counterexample_pair(alpha: float, beta: float) -> tuple[Dist, Dist]:
    """Three-point pair on which the Renyi 2-cut falls strictly below Renyi itself.

    ``mu1`` is uniform and ``mu2`` is proportional to ``(p^2, p, 1)`` with
    ``p = 2^(-beta/(alpha-1))``; requires ``beta > alpha + 1``.
    """
    if not alpha > 1:
        raise DomainError(f"alpha must exceed 1, got {alpha}")
    if not beta > alpha + 1:
        raise DomainError(f"beta must exceed alpha + 1 = {alpha + 1}, got {beta}")
    p = 0.5 ** (beta / (alpha - 1.0))
    z = p * p + p + 1.0
    labels = ("a", "b", "c")
    return Dist.uniform(labels), Dist(labels, (p * p / z, p / z, 1.0 / z))


def counterexample_bound(alpha: float, beta: float) -> float:
    """Lower bound on the Renyi 2-cut gap of :func:`counterexample_pair`."""
    num = 2.0**beta + 2.0**-beta + 1.0
    return math.log(min(num / 2.0 ** (alpha + 1), num / (2.0**beta + 1.0))) / (alpha - 1.0)


def delta_distinguishing(
    spec: DivergenceSpec, delta: float, mu1: Dist, mu2: Dist, k: Optional[int] = None
) -> bool:
    """``Delta(mu1, mu2) > delta``; with ``k`` given, the k-cut is tested instead."""
    value = evaluate(spec, mu1, mu2) if k is None else k_cut(spec, k, mu1, mu2).value
    return value > delta


def search_gap(
    spec: DivergenceSpec, k: int, n: int, trials: int, seed: int = 0
) -> Optional[tuple[Dist, Dist, CutResult]]:
    """Random search for a pair on ``n`` points whose k-cut is strictly below the divergence.

    Returns the pair with the largest gap found, or None if every sampled
    pair had gap <= 1e-9.
    """
    from divkit.sampling import random_pair

    best = None
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        mu1, mu2 = random_pair(rng, n)
        res = k_cut(spec, k, mu1, mu2)
        if math.isfinite(res.gap) and res.gap > GAP_TOL and (best is None or res.gap > best[2].gap):
            best = (mu1, mu2, res)
    return best
