"""Welfare bases, mechanisms, the (a, x, b) index sets and named presets."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import InvalidArgumentError

__all__ = [
    "IndexTriple",
    "Mechanism",
    "WelfareBasis",
    "enumerate_boundary_set",
    "enumerate_index_set",
    "preset_mechanism",
    "preset_welfare",
]


class IndexTriple(NamedTuple):
    """Selector counts of a resource class.

    ``a`` agents pick the resource only at equilibrium, ``x`` at both
    equilibrium and optimum, ``b`` only at the optimum.
    """

    a: int
    x: int
    b: int


@dataclass(frozen=True)
class _Vector:
    values: tuple[float, ...]

    def __post_init__(self):
        try:
            vals = tuple(float(v) for v in self.values)
        except (TypeError, ValueError) as exc:
            raise InvalidArgumentError(f"{type(self).__name__} values must be reals") from exc
        if not vals:
            raise InvalidArgumentError(f"{type(self).__name__} needs at least one entry")
        if not all(math.isfinite(v) for v in vals):
            raise InvalidArgumentError(f"{type(self).__name__} values must be finite")
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return len(self.values)

    def __call__(self, j: int) -> float:
        # f(0) = f(n+1) = 0 by convention; the padding is never stored
        if 1 <= j <= self.n:
            return self.values[j - 1]
        if j == 0 or j == self.n + 1:
            return 0.0
        raise IndexError(f"index {j} outside [0, {self.n + 1}]")

    def __len__(self) -> int:
        return self.n

    def padded(self) -> np.ndarray:
        """Array ``[v(0), v(1), ..., v(n), v(n+1)]`` with zero ends."""
        out = np.zeros(self.n + 2)
        out[1:-1] = self.values
        return out

    def truncate(self, n: int):
        if n < 1:
            raise InvalidArgumentError("n must be a positive integer")
        if n > self.n:
            raise InvalidArgumentError(
                f"{type(self).__name__} has {self.n} entries, need at least {n}"
            )
        if n == self.n:
            return self
        return type(self)(self.values[:n])

    def to_dict(self) -> dict:
        return {"n": self.n, "values": list(self.values)}

    @classmethod
    def from_dict(cls, data: dict):
        try:
            n = data["n"]
            values = data["values"]
        except (KeyError, TypeError) as exc:
            raise InvalidArgumentError(f"{cls.__name__} JSON needs 'n' and 'values'") from exc
        if not isinstance(values, list) or n != len(values):
            raise InvalidArgumentError(f"{cls.__name__} JSON: 'n' must equal len(values)")
        return cls(values)


@dataclass(frozen=True)
class WelfareBasis(_Vector):
    """Positive welfare multipliers w(1..n); W_r(j) = v_r * w(j)."""

    def __post_init__(self):
        super().__post_init__()
        if any(v <= 0 for v in self.values):
            raise InvalidArgumentError("welfare basis entries must be strictly positive")

    def scaled(self, c: float) -> "WelfareBasis":
        return WelfareBasis(tuple(c * v for v in self.values))


@dataclass(frozen=True)
class Mechanism(_Vector):
    """Utility-generating function f(1..n). Any sign is allowed."""

    def is_nonincreasing(self) -> bool:
        return all(self.values[j] <= self.values[j - 1] for j in range(1, self.n))


def _check_n(n) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidArgumentError(f"n must be a positive integer, got {n!r}")
    return int(n)


def enumerate_index_set(n: int) -> list[IndexTriple]:
    """All (a, x, b) >= 0 with 1 <= a + x + b <= n, lexicographic in (a, x, b).

    >>> enumerate_index_set(1)
    [IndexTriple(a=0, x=0, b=1), IndexTriple(a=0, x=1, b=0), IndexTriple(a=1, x=0, b=0)]
    """
    n = _check_n(n)
    return [
        IndexTriple(a, x, b)
        for a in range(n + 1)
        for x in range(n + 1 - a)
        for b in range(n + 1 - a - x)
        if a + x + b >= 1
    ]


def enumerate_boundary_set(n: int) -> list[IndexTriple]:
    """The triples of the index set lying on a face: a*x*b == 0 or a+x+b == n."""
    return [t for t in enumerate_index_set(n) if t.a * t.x * t.b == 0 or sum(t) == n]


def preset_welfare(name: str, n: int, p: float | None = None) -> WelfareBasis:
    """``covering``: w(j) = 1. ``coverage``: w(j) = 1 - (1 - p)**j with p in (0, 1]."""
    n = _check_n(n)
    if name == "covering":
        return WelfareBasis((1.0,) * n)
    if name == "coverage":
        if p is None or not (0.0 < p <= 1.0):
            raise InvalidArgumentError(f"coverage needs p in (0, 1], got {p!r}")
        return WelfareBasis(tuple(1.0 - (1.0 - p) ** j for j in range(1, n + 1)))
    raise InvalidArgumentError(f"unknown welfare preset {name!r}")


_MECHANISM_ALIASES = {
    "es": "equal_share",
    "equal_share": "equal_share",
    "mc": "marginal_contribution",
    "marginal_contribution": "marginal_contribution",
    "gairing": "gairing_covering",
    "gairing_covering": "gairing_covering",
}


def _gairing_entry(j: int) -> float:
    # (j-1)! * (e - sum_{i<j} 1/i!) equals (j-1)! * sum_{i>=j} 1/i!; summing the
    # tail directly avoids the cancellation in e - partial_sum for large j.
    if j == 1:
        return 1.0  # the tail is e - 1 itself
    term = 1.0 / j
    total = term
    k = j + 1
    while term > 1e-18 * total:
        term /= k
        total += term
        k += 1
    return total / math.expm1(1.0)


def preset_mechanism(
    name: str,
    n: int,
    w: WelfareBasis | None = None,
    p: float | None = None,
) -> Mechanism:
    """Named mechanisms.

    equal_share (needs ``w``): f(j) = w(j)/j.
    marginal_contribution (``w`` or ``p``): f(j) = w(j) - w(j-1); with ``p`` the
    coverage basis is used, giving p(1-p)**(j-1).
    gairing_covering: f(j) = (j-1)!/(e-1) * (e - sum_{i=0}^{j-1} 1/i!).
    """
    n = _check_n(n)
    key = _MECHANISM_ALIASES.get(name)
    if key is None:
        raise InvalidArgumentError(f"unknown mechanism preset {name!r}")
    if key == "gairing_covering":
        return Mechanism(tuple(_gairing_entry(j) for j in range(1, n + 1)))
    if w is None:
        if key == "marginal_contribution" and p is not None:
            w = preset_welfare("coverage", n, p)
        else:
            raise InvalidArgumentError(f"{key} needs a welfare basis")
    w = w.truncate(n)
    if key == "equal_share":
        return Mechanism(tuple(w(j) / j for j in range(1, n + 1)))
    return Mechanism(tuple(w(j) - w(j - 1) for j in range(1, n + 1)))


def as_basis(w: WelfareBasis | Sequence[float]) -> WelfareBasis:
    return w if isinstance(w, WelfareBasis) else WelfareBasis(tuple(w))


def as_mechanism(f: Mechanism | Sequence[float]) -> Mechanism:
    return f if isinstance(f, Mechanism) else Mechanism(tuple(f))
