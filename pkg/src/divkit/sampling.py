"""Random distributions and channels for sweeps, searches and falsification."""

from __future__ import annotations

import numpy as np

from divkit.core import Channel, Dist, default_labels


def random_probs(rng: np.random.Generator, n: int) -> np.ndarray:
    """A draw that mixes flat Dirichlet vectors with heavily skewed ones.

    Half the time the vector is Dirichlet with a log-uniform concentration;
    otherwise it is a softmax of Gaussian logits with a log-uniform scale,
    which spreads mass over many orders of magnitude.
    """
    if rng.random() < 0.5:
        conc = np.exp(rng.uniform(np.log(0.05), np.log(5.0)))
        v = rng.dirichlet(np.full(n, conc))
        if not np.all(np.isfinite(v)) or v.sum() <= 0:
            v = np.full(n, 1.0 / n)
    else:
        scale = np.exp(rng.uniform(np.log(0.1), np.log(12.0)))
        logits = scale * rng.standard_normal(n)
        v = np.exp(logits - logits.max())
    v = v / v.sum()
    return v


def random_dist(rng: np.random.Generator, n: int, labels=None) -> Dist:
    return Dist.from_array(random_probs(rng, n), labels or default_labels(n))


def random_pair(rng: np.random.Generator, n: int) -> tuple[Dist, Dist]:
    labels = default_labels(n)
    return random_dist(rng, n, labels), random_dist(rng, n, labels)


def random_channel(rng: np.random.Generator, n_in: int, n_out: int, sparsity: float = 0.0) -> Channel:
    """Rows drawn by :func:`random_probs`; ``sparsity`` zeroes entries at random (keeping one per row)."""
    rows = np.array([random_probs(rng, n_out) for _ in range(n_in)])
    if sparsity > 0:
        drop = rng.random(rows.shape) < sparsity
        drop[np.arange(n_in), rows.argmax(axis=1)] = False
        rows = np.where(drop, 0.0, rows)
        rows /= rows.sum(axis=1, keepdims=True)
    return Channel.from_array(rows, default_labels(n_in), tuple(str(j) for j in range(n_out)))
