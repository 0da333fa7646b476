"""Finite distributions, channels and the weak Birkhoff-von Neumann decomposition.

Everything here is an immutable value. Probabilities are 64-bit floats; a
distribution (or a channel row) whose mass deviates from 1 by more than
``SUM_TOL`` is rejected rather than renormalised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from divkit.errors import DomainError, NumericError

SUM_TOL = 1e-9
EXACT_TOL = 1e-12


def _check_labels(labels: Sequence[str], what: str) -> tuple[str, ...]:
    labels = tuple(str(s) for s in labels)
    if not labels:
        raise DomainError(f"{what} must be non-empty")
    if len(set(labels)) != len(labels):
        raise DomainError(f"{what} contains duplicate labels: {labels}")
    return labels


def _check_row(row: Iterable[float], what: str) -> tuple[float, ...]:
    row = tuple(float(v) for v in row)
    for v in row:
        if not math.isfinite(v) or v < 0.0:
            raise DomainError(f"{what} has an invalid probability {v!r}")
    total = math.fsum(row)
    if abs(total - 1.0) > SUM_TOL:
        raise DomainError(f"{what} sums to {total!r}, not 1")
    # -0.0 compares equal to 0.0 but prints badly
    return tuple(v + 0.0 for v in row)


@dataclass(frozen=True)
class Dist:
    """A probability distribution over an ordered, finite set of labels."""

    labels: tuple[str, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        labels = _check_labels(self.labels, "Dist labels")
        if len(self.probs) != len(labels):
            raise DomainError(
                f"Dist has {len(labels)} labels but {len(self.probs)} probabilities"
            )
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "probs", _check_row(self.probs, "Dist"))

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, float]) -> "Dist":
        return cls(tuple(mapping), tuple(mapping.values()))

    @classmethod
    def uniform(cls, labels: Sequence[str]) -> "Dist":
        return cls(tuple(labels), (1.0 / len(labels),) * len(labels))

    @classmethod
    def from_array(cls, probs, labels: Sequence[str] | None = None) -> "Dist":
        probs = np.asarray(probs, dtype=float)
        if labels is None:
            labels = default_labels(len(probs))
        return cls(tuple(labels), tuple(probs.tolist()))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.probs, dtype=float)

    def __len__(self) -> int:
        return len(self.labels)

    def __getitem__(self, label: str) -> float:
        try:
            return self.probs[self.labels.index(label)]
        except ValueError:
            raise DomainError(f"label {label!r} not in {self.labels}") from None

    def mass(self, subset: Iterable[str]) -> float:
        return math.fsum(self[s] for s in subset)

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "probs": list(self.probs)}

    @classmethod
    def from_dict(cls, data: Mapping) -> "Dist":
        try:
            return cls(tuple(data["labels"]), tuple(data["probs"]))
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed Dist JSON: {exc}") from None


def default_labels(n: int) -> tuple[str, ...]:
    """``a, b, c, ...`` for small n, ``x0, x1, ...`` beyond 26."""
    if n <= 26:
        return tuple("abcdefghijklmnopqrstuvwxyz"[:n])
    return tuple(f"x{i}" for i in range(n))


@dataclass(frozen=True)
class Channel:
    """A row-stochastic map from ``in_labels`` to distributions on ``out_labels``."""

    in_labels: tuple[str, ...]
    out_labels: tuple[str, ...]
    matrix: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        ins = _check_labels(self.in_labels, "Channel in_labels")
        outs = _check_labels(self.out_labels, "Channel out_labels")
        if len(self.matrix) != len(ins):
            raise DomainError(f"Channel needs {len(ins)} rows, got {len(self.matrix)}")
        rows = []
        for label, row in zip(ins, self.matrix):
            row = tuple(row)
            if len(row) != len(outs):
                raise DomainError(f"Channel row {label!r} has {len(row)} entries, expected {len(outs)}")
            rows.append(_check_row(row, f"Channel row {label!r}"))
        object.__setattr__(self, "in_labels", ins)
        object.__setattr__(self, "out_labels", outs)
        object.__setattr__(self, "matrix", tuple(rows))

    @classmethod
    def from_array(cls, matrix, in_labels=None, out_labels=None) -> "Channel":
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2:
            raise DomainError("Channel matrix must be two-dimensional")
        if in_labels is None:
            in_labels = default_labels(matrix.shape[0])
        if out_labels is None:
            out_labels = tuple(str(j) for j in range(matrix.shape[1]))
        return cls(tuple(in_labels), tuple(out_labels), tuple(map(tuple, matrix.tolist())))

    @classmethod
    def identity(cls, labels: Sequence[str]) -> "Channel":
        labels = tuple(labels)
        return cls.from_array(np.eye(len(labels)), labels, labels)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=float)

    @property
    def is_deterministic(self) -> bool:
        return all(sum(1 for v in row if v == 1.0) == 1 for row in self.matrix)

    def to_rule(self) -> "DeterministicRule":
        if not self.is_deterministic:
            raise DomainError("channel is not deterministic")
        targets = tuple(self.out_labels[row.index(1.0)] for row in self.matrix)
        return DeterministicRule(self.in_labels, self.out_labels, targets)

    def to_dict(self) -> dict:
        return {
            "in_labels": list(self.in_labels),
            "out_labels": list(self.out_labels),
            "matrix": [list(row) for row in self.matrix],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Channel":
        try:
            return cls(
                tuple(data["in_labels"]),
                tuple(data["out_labels"]),
                tuple(tuple(row) for row in data["matrix"]),
            )
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed Channel JSON: {exc}") from None


@dataclass(frozen=True)
class DeterministicRule:
    """A function ``in_labels -> out_labels``, stored as one target per input."""

    in_labels: tuple[str, ...]
    out_labels: tuple[str, ...]
    targets: tuple[str, ...]

    def __post_init__(self):
        ins = _check_labels(self.in_labels, "rule in_labels")
        outs = _check_labels(self.out_labels, "rule out_labels")
        targets = tuple(str(t) for t in self.targets)
        if len(targets) != len(ins):
            raise DomainError("rule must assign every input label")
        bad = set(targets) - set(outs)
        if bad:
            raise DomainError(f"rule targets {sorted(bad)} are not output labels")
        object.__setattr__(self, "in_labels", ins)
        object.__setattr__(self, "out_labels", outs)
        object.__setattr__(self, "targets", targets)

    @classmethod
    def from_indices(cls, in_labels, out_labels, indices) -> "DeterministicRule":
        out_labels = tuple(out_labels)
        return cls(tuple(in_labels), out_labels, tuple(out_labels[int(i)] for i in indices))

    @property
    def assignment(self) -> dict[str, str]:
        return dict(zip(self.in_labels, self.targets))

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(self.out_labels.index(t) for t in self.targets)

    def __call__(self, label: str) -> str:
        return self.assignment[label]

    def as_channel(self) -> Channel:
        m = np.zeros((len(self.in_labels), len(self.out_labels)))
        m[np.arange(len(self.in_labels)), self.indices] = 1.0
        return Channel.from_array(m, self.in_labels, self.out_labels)

    def blocks(self) -> list[list[str]]:
        """Preimages of each output label, in output order."""
        return [[x for x, t in zip(self.in_labels, self.targets) if t == y] for y in self.out_labels]

    def to_dict(self) -> dict:
        return {
            "in_labels": list(self.in_labels),
            "out_labels": list(self.out_labels),
            "assignment": self.assignment,
        }


@dataclass(frozen=True)
class BvnDecomposition:
    """``gamma(x) = sum_m weight_m * dirac(rule_m(x))``."""

    terms: tuple[tuple[float, DeterministicRule], ...] = field(default_factory=tuple)

    @property
    def weights(self) -> list[float]:
        return [w for w, _ in self.terms]

    @property
    def rules(self) -> list[DeterministicRule]:
        return [r for _, r in self.terms]

    def reconstruct(self) -> np.ndarray:
        rule = self.terms[0][1]
        out = np.zeros((len(rule.in_labels), len(rule.out_labels)))
        rows = np.arange(len(rule.in_labels))
        for w, r in self.terms:
            out[rows, r.indices] += w
        return out

    def to_dict(self) -> dict:
        return {"terms": [{"weight": w, "rule": r.to_dict()} for w, r in self.terms]}


def dirac(label: str, space: Sequence[str]) -> Dist:
    space = tuple(space)
    if label not in space:
        raise DomainError(f"label {label!r} not in space {space}")
    return Dist(space, tuple(1.0 if s == label else 0.0 for s in space))


def pushforward(gamma: Channel, mu: Dist) -> Dist:
    """The output distribution of ``gamma`` fed with ``mu``."""
    if mu.labels != gamma.in_labels:
        raise DomainError(f"distribution labels {mu.labels} do not match channel inputs {gamma.in_labels}")
    out = mu.array @ gamma.array
    return Dist(gamma.out_labels, tuple(out.tolist()))


def compose(gamma2: Channel, gamma1: Channel) -> Channel:
    """``gamma2 . gamma1``: run ``gamma1`` first, then ``gamma2``."""
    if gamma1.out_labels != gamma2.in_labels:
        raise DomainError(
            f"cannot compose: {gamma1.out_labels} is not the input space {gamma2.in_labels}"
        )
    return Channel.from_array(gamma1.array @ gamma2.array, gamma1.in_labels, gamma2.out_labels)


def bvn_decompose(gamma: Channel) -> BvnDecomposition:
    """Write a channel as a convex combination of deterministic rules.

    Each step takes the row-wise argmax (lowest index on ties), weights it by
    the smallest row maximum and subtracts. The entry attaining that minimum
    becomes exactly zero, so at most ``|X|*|Y|`` steps are taken. Iteration
    stops once the remaining row mass drops below 1e-12; the last weight
    absorbs that remainder so the weights sum to one.
    """
    f = gamma.array
    n_in, n_out = f.shape
    rows = np.arange(n_in)
    remaining = 1.0
    weights: list[float] = []
    picks: list[np.ndarray] = []
    while len(weights) < n_in * n_out:
        cols = np.argmax(f, axis=1)
        alpha = float(f[rows, cols].min())
        if alpha <= 0.0:
            break
        f[rows, cols] -= alpha
        remaining -= alpha
        weights.append(alpha)
        picks.append(cols)
        if remaining < EXACT_TOL:
            break
    if not weights:
        raise NumericError("decomposition produced no terms")
    if remaining > math.sqrt(SUM_TOL):
        raise NumericError(f"decomposition stalled with residual mass {remaining:.3g}")
    weights[-1] = 1.0 - math.fsum(weights[:-1])
    return BvnDecomposition(
        tuple(
            (w, DeterministicRule.from_indices(gamma.in_labels, gamma.out_labels, cols))
            for w, cols in zip(weights, picks)
        )
    )
