"""Randomised response and exhaustive checkers for DP, RDP, zCDP and tCDP claims."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from divkit.core import Dist
from divkit.divergences import eps_arrays, max_arrays, renyi_arrays
from divkit.errors import CapacityError, DomainError
from divkit.regions import ErrorPoint, decision_points

MAX_BITS = 10
MAX_CLOUD_OUTCOMES = 20
# rounding slack for certification; boundary-tight claims (e.g. the exact RR epsilon) need it
CLAIM_TOL = 1e-12

Bits = Union[str, Sequence[int]]


@dataclass(frozen=True)
class RandomizedResponse:
    """Flip each of ``n_bits`` input bits independently with probability ``flip_p``."""

    n_bits: int
    flip_p: float

    def __post_init__(self):
        if not 1 <= self.n_bits <= MAX_BITS:
            raise CapacityError(f"randomized response supports 1..{MAX_BITS} bits, got {self.n_bits}")
        if not 0 < self.flip_p < 1:
            raise DomainError(f"flip probability must lie in (0, 1), got {self.flip_p}")

    @classmethod
    def parse(cls, text: str) -> "RandomizedResponse":
        """CLI syntax ``rr:3,0.34``."""
        name, _, args = text.partition(":")
        try:
            bits, flip = args.split(",")
            if name != "rr":
                raise ValueError
            return cls(int(bits), float(flip))
        except ValueError:
            raise DomainError(f"cannot parse mechanism {text!r}") from None

    @property
    def outcomes(self) -> tuple[str, ...]:
        return tuple("".join(b) for b in itertools.product("01", repeat=self.n_bits))


def _bits(spec: RandomizedResponse, value: Bits) -> str:
    s = value if isinstance(value, str) else "".join(str(int(b)) for b in value)
    if len(s) != spec.n_bits or set(s) - {"0", "1"}:
        raise DomainError(f"input must be {spec.n_bits} bits, got {value!r}")
    return s


def mech_output(spec: RandomizedResponse, value: Bits) -> Dist:
    """Exact output distribution over ``{0,1}^n`` (outcomes in lexicographic order)."""
    x = _bits(spec, value)
    p = spec.flip_p
    probs = []
    for out in spec.outcomes:
        flips = sum(a != b for a, b in zip(x, out))
        probs.append(p**flips * (1 - p) ** (spec.n_bits - flips))
    return Dist(spec.outcomes, tuple(probs))


def adjacent_pairs(spec: RandomizedResponse) -> list[tuple[str, str]]:
    """Unordered Hamming-1 pairs ``(x0, x1)`` with ``x0 < x1``; ``n 2^(n-1)`` of them."""
    pairs = []
    for x in spec.outcomes:
        for i in range(spec.n_bits):
            if x[i] == "0":
                pairs.append((x, x[:i] + "1" + x[i + 1 :]))
    return pairs


@dataclass(frozen=True)
class PrivacyClaim:
    """``dp(eps, delta)``, ``rdp(alpha, rho)``, ``zcdp(xi, rho)`` or ``tcdp(rho, omega)``."""

    kind: str
    a: float
    b: float

    def __post_init__(self):
        kind, a, b = self.kind, self.a, self.b
        if kind == "dp" and not (a >= 0 and 0 <= b <= 1):
            raise DomainError(f"dp claim needs eps >= 0, delta in [0, 1], got ({a}, {b})")
        elif kind == "rdp" and not (a > 1 and b >= 0):
            raise DomainError(f"rdp claim needs alpha > 1, rho >= 0, got ({a}, {b})")
        elif kind == "zcdp" and not (a >= 0 and b >= 0):
            raise DomainError(f"zcdp claim needs xi >= 0, rho >= 0, got ({a}, {b})")
        elif kind == "tcdp" and not (a >= 0 and b > 1):
            raise DomainError(f"tcdp claim needs rho >= 0, omega > 1, got ({a}, {b})")
        elif kind not in ("dp", "rdp", "zcdp", "tcdp"):
            raise DomainError(f"unknown privacy claim {kind!r}")

    @classmethod
    def parse(cls, text: str) -> "PrivacyClaim":
        """CLI syntax ``dp:0.66,0``, ``rdp:2,0.2``, ``zcdp:0.6633,0``, ``tcdp:0.1,8``."""
        kind, _, args = text.partition(":")
        try:
            a, b = (float(v) for v in args.split(","))
        except ValueError:
            raise DomainError(f"cannot parse privacy claim {text!r}") from None
        return cls(kind.lower(), a, b)


@dataclass(frozen=True)
class ClaimCheck:
    holds: bool
    worst_margin: float
    pair: tuple[str, str]
    alpha: Optional[float]
    value: float
    label: str

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "worst_margin": self.worst_margin,
            "pair": list(self.pair),
            "alpha": self.alpha,
            "value": self.value,
            "label": self.label,
        }


def alpha_grid(alpha_max: float = 64.0, n: int = 200, lo: float = 1.0 + 2.0**-10) -> np.ndarray:
    """Log-spaced in ``alpha - 1`` from ``lo`` to ``alpha_max``."""
    return 1.0 + np.geomspace(lo - 1.0, alpha_max - 1.0, n)


def check_claim(spec: RandomizedResponse, claim: PrivacyClaim, tol: float = CLAIM_TOL) -> ClaimCheck:
    """Check a claim on every ordered adjacent pair; report the tightest (pair, alpha).

    zCDP and tCDP quantify over all orders, checked on :func:`alpha_grid`
    (200 points up to 64, or up to omega for tCDP); for zCDP with ``rho = 0``
    the bound is constant in alpha and the max divergence covers the limit.
    A claim holds when every margin (value minus bound) is at most ``tol``.
    """
    ordered = [(a, b) for a, b in adjacent_pairs(spec)] + [(b, a) for a, b in adjacent_pairs(spec)]
    p = np.array([mech_output(spec, a).array for a, _ in ordered])
    q = np.array([mech_output(spec, b).array for _, b in ordered])
    kind = claim.kind
    label = "exact"
    if kind == "dp":
        values = eps_arrays(claim.a, p, q)[:, None]
        bounds = np.full_like(values, claim.b)
        alphas = [None]
    elif kind == "rdp":
        values = renyi_arrays(claim.a, p, q)[:, None]
        bounds = np.full_like(values, claim.b)
        alphas = [claim.a]
    else:
        label = "grid-verified"
        if kind == "zcdp":
            grid = alpha_grid()
            bound_of = lambda a: claim.a + a * claim.b
        else:
            grid = alpha_grid(alpha_max=claim.b, lo=1.0 + min(2.0**-10, (claim.b - 1.0) / 2))[:-1]
            bound_of = lambda a: a * claim.a
        values = np.stack([renyi_arrays(a, p, q) for a in grid], axis=1)
        bounds = np.array([bound_of(a) for a in grid])[None, :].repeat(len(ordered), axis=0)
        alphas = list(grid)
        if kind == "zcdp" and claim.b == 0:
            values = np.concatenate([values, max_arrays(p, q)[:, None]], axis=1)
            bounds = np.concatenate([bounds, np.full((len(ordered), 1), claim.a)], axis=1)
            alphas.append(math.inf)
    margins = values - bounds
    i, j = np.unravel_index(int(np.argmax(margins)), margins.shape)
    return ClaimCheck(
        bool(margins[i, j] <= tol),
        float(margins[i, j]),
        ordered[i],
        None if alphas[j] is None else float(alphas[j]),
        float(values[i, j]),
        label,
    )


def error_cloud(spec: RandomizedResponse, pair: tuple[Bits, Bits]) -> list[ErrorPoint]:
    """(PFA, PMD) of every rejection region over the output space, in subset order."""
    x0, x1 = (_bits(spec, v) for v in pair)
    if sum(a != b for a, b in zip(x0, x1)) != 1:
        raise DomainError(f"{x0} and {x1} are not adjacent")
    if 2**spec.n_bits > MAX_CLOUD_OUTCOMES:
        raise CapacityError(f"error cloud limited to {MAX_CLOUD_OUTCOMES} outcomes")
    x, y, _ = decision_points(mech_output(spec, x0), mech_output(spec, x1))
    return [ErrorPoint(float(a), float(b)) for a, b in zip(x, y)]
