"""Worst-case games realizing a feasible theta exactly (wheel construction).

For every support triple (a, x, b) the builder places n resources
r(a,x,b,1..n) of value theta(a,x,b)/n on a ring. Player i (1-based) takes, at
equilibrium, the a+x consecutive resources starting at j = i, and at the
optimum the b+x consecutive resources starting at j = i - b (mod n). Every
ring resource ends up with exactly a+x equilibrium selectors and b+x optimum
selectors, x of which are shared.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .core import IndexTriple, as_basis, as_mechanism
from .errors import InvalidArgumentError, PreconditionError
from .games import Allocation, GameInstance, welfare
from .lpsolve import TAU_FEAS
from .poa import TAU_SUPPORT

__all__ = ["WitnessGame", "build_worst_case", "equilibrium_arc", "optimum_arc", "resource_id"]


@dataclass(frozen=True)
class WitnessGame:
    game: GameInstance
    designated_equilibrium: Allocation
    designated_optimum: Allocation
    predicted_ratio: float

    def to_dict(self) -> dict:
        out = self.game.to_dict()
        out["designated_equilibrium"] = list(self.designated_equilibrium)
        out["designated_optimum"] = list(self.designated_optimum)
        out["predicted_ratio"] = self.predicted_ratio
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "WitnessGame":
        game = GameInstance.from_dict(data)
        try:
            return cls(
                game,
                tuple(data["designated_equilibrium"]),
                tuple(data["designated_optimum"]),
                float(data["predicted_ratio"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgumentError(f"malformed witness JSON: {exc}") from exc


def equilibrium_arc(t: IndexTriple, i: int, n: int) -> list[int]:
    """Ring positions j in [1, n] player i takes at equilibrium for triple t."""
    return [j for j in range(1, n + 1) if t.a + t.x >= 1 + (j - i) % n]


def optimum_arc(t: IndexTriple, i: int, n: int) -> list[int]:
    return [j for j in range(1, n + 1) if t.b + t.x >= 1 + (j - i + t.b) % n]


def resource_id(t: IndexTriple, j: int) -> str:
    return f"r({t.a},{t.x},{t.b},{j})"


def build_worst_case(theta: Mapping, f, w, n: int) -> WitnessGame:
    """Game whose designated equilibrium has welfare 1 and optimum sum w(b+x) theta.

    ``theta`` maps (a, x, b) triples to non-negative reals and must satisfy the
    primal constraints: the summed equilibrium condition and normalization.
    """
    f, w = as_mechanism(f).truncate(n), as_basis(w).truncate(n)
    support: dict[IndexTriple, float] = {}
    for key, value in theta.items():
        t = IndexTriple(*key)
        if min(t) < 0 or not 1 <= sum(t) <= n:
            raise PreconditionError(f"triple {tuple(t)} is outside the index set for n = {n}")
        if value < -TAU_SUPPORT:
            raise PreconditionError(f"theta{tuple(t)} = {value} is negative")
        if value >= TAU_SUPPORT:
            support[t] = float(value)
    if not support:
        raise PreconditionError("theta has empty support")
    support = dict(sorted(support.items()))

    eq_terms = [(t.a * f(t.a + t.x) - t.b * f(t.a + t.x + 1)) * v for t, v in support.items()]
    eq_sum = sum(eq_terms)
    norm = sum(w(t.a + t.x) * v for t, v in support.items())
    violated = []
    if eq_sum < -TAU_FEAS * max(1.0, sum(abs(e) for e in eq_terms)):
        violated.append(f"equilibrium constraint: sum = {eq_sum} < 0")
    if abs(norm - 1.0) > TAU_FEAS * max(1.0, norm):
        violated.append(f"normalization constraint: sum w(a+x) theta = {norm} != 1")
    if violated:
        raise PreconditionError("theta is infeasible; violated " + "; ".join(violated))
    opt_value = sum(w(t.b + t.x) * v for t, v in support.items())

    resources = [
        (resource_id(t, j), v / n) for t, v in support.items() for j in range(1, n + 1)
    ]
    actions = []
    for i in range(1, n + 1):
        eq = frozenset(resource_id(t, j) for t in support for j in equilibrium_arc(t, i, n))
        opt = frozenset(resource_id(t, j) for t in support for j in optimum_arc(t, i, n))
        actions.append((eq, opt))
    game = GameInstance(tuple(resources), tuple(actions), w, f, n)
    return WitnessGame(game, (0,) * n, (1,) * n, norm / opt_value)


def realized_values(witness: WitnessGame) -> tuple[float, float]:
    """Welfare at the designated equilibrium and optimum."""
    g = witness.game
    return welfare(g, witness.designated_equilibrium), welfare(g, witness.designated_optimum)
