"""Finite resource-allocation games: welfare, utilities, potential, equilibria.

A game has ``n`` players; player ``i`` picks one of its actions, each action a
set of resource ids. With loads |a|_r,

    W(a)   = sum_r v_r w(|a|_r)
    U_i(a) = sum_{r in a_i} v_r f(|a|_r)
    phi(a) = sum_r v_r (f(1) + ... + f(|a|_r))

Exhaustive routines enumerate joint profiles through the kernels in
:mod:`poalp.kernels`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import kernels
from .core import Mechanism, WelfareBasis, as_basis, as_mechanism
from .errors import InvalidArgumentError, PreconditionError, ResourceLimitError
from .lpsolve import TAU_FEAS

__all__ = [
    "EPS_DEV",
    "GameInstance",
    "SmoothnessResult",
    "best_response_dynamics",
    "budget_balance_gap",
    "check_smoothness",
    "enumerate_equilibria",
    "is_nash",
    "load_profile",
    "poa_of_game",
    "potential",
    "utility",
    "welfare",
]

EPS_DEV = 1e-9
MAX_PROFILES = 10**7

Allocation = tuple[int, ...]


@dataclass(frozen=True)
class GameInstance:
    resources: tuple[tuple[str, float], ...]
    actions: tuple[tuple[frozenset, ...], ...]
    w: WelfareBasis
    f: Mechanism
    n: int = field(default=-1)

    def __post_init__(self):
        resources = tuple((str(rid), float(v)) for rid, v in self.resources)
        ids = [rid for rid, _ in resources]
        if len(set(ids)) != len(ids):
            raise InvalidArgumentError("resource ids must be unique")
        for rid, v in resources:
            if not math.isfinite(v) or v < 0:
                raise InvalidArgumentError(f"resource {rid!r} has invalid value {v}")
        known = set(ids)
        actions = []
        for i, acts in enumerate(self.actions):
            acts = tuple(acts)
            if not acts:
                raise InvalidArgumentError(f"player {i} has no action (use the empty set)")
            player = []
            for k, act in enumerate(acts):
                items = [str(r) for r in act]
                if len(set(items)) != len(items):
                    raise InvalidArgumentError(f"player {i} action {k} lists a resource twice")
                missing = set(items) - known
                if missing:
                    raise InvalidArgumentError(
                        f"player {i} action {k} references unknown resources {sorted(missing)}"
                    )
                player.append(frozenset(items))
            actions.append(tuple(player))
        n = len(actions) if self.n == -1 else self.n
        if n != len(actions) or n < 1:
            raise InvalidArgumentError(f"n = {self.n} but {len(actions)} action lists given")
        w, f = as_basis(self.w), as_mechanism(self.f)
        if w.n < n or f.n < n:
            raise InvalidArgumentError(f"w and f need at least n = {n} entries")
        object.__setattr__(self, "resources", resources)
        object.__setattr__(self, "actions", tuple(actions))
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "n", n)

    @cached_property
    def resource_index(self) -> dict[str, int]:
        return {rid: k for k, (rid, _) in enumerate(self.resources)}

    @cached_property
    def arrays(self):
        """(values, masks, n_actions, wpad, fpad) in the layout the kernels expect."""
        m = len(self.resources)
        kmax = max(len(a) for a in self.actions)
        values = np.array([v for _, v in self.resources], dtype=np.float64)
        masks = np.zeros((self.n, kmax, m), dtype=np.uint8)
        for i, acts in enumerate(self.actions):
            for k, act in enumerate(acts):
                for rid in act:
                    masks[i, k, self.resource_index[rid]] = 1
        n_actions = np.array([len(a) for a in self.actions], dtype=np.intp)
        wpad = self.w.truncate(self.n).padded()
        fpad = self.f.truncate(self.n).padded()
        return values, masks, n_actions, wpad, fpad

    @property
    def n_profiles(self) -> int:
        return math.prod(len(a) for a in self.actions)

    def allocation(self, index: int) -> Allocation:
        out = []
        for acts in reversed(self.actions):
            index, k = divmod(index, len(acts))
            out.append(k)
        return tuple(reversed(out))

    def profile_index(self, allocation: Sequence[int]) -> int:
        idx = 0
        for k, acts in zip(allocation, self.actions):
            idx = idx * len(acts) + k
        return idx

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "resources": [{"id": rid, "value": v} for rid, v in self.resources],
            "actions": [[sorted(act, key=self._order) for act in acts] for acts in self.actions],
            "w": self.w.to_dict(),
            "f": self.f.to_dict(),
        }

    def _order(self, rid):
        return self.resource_index[rid]

    @classmethod
    def from_dict(cls, data: dict) -> "GameInstance":
        try:
            resources = [(r["id"], r["value"]) for r in data["resources"]]
            actions = [[list(act) for act in acts] for acts in data["actions"]]
            w = WelfareBasis.from_dict(data["w"])
            f = Mechanism.from_dict(data["f"])
            n = data["n"]
        except (KeyError, TypeError) as exc:
            raise InvalidArgumentError(f"malformed game JSON: missing or invalid field {exc}") from exc
        for acts in actions:
            for act in acts:
                if len(set(map(str, act))) != len(act):
                    raise InvalidArgumentError("an action lists the same resource twice")
        return cls(tuple(resources), tuple(tuple(a) for a in actions), w, f, n)


def _check(game: GameInstance, allocation: Sequence[int]) -> Allocation:
    allocation = tuple(int(k) for k in allocation)
    if len(allocation) != game.n:
        raise InvalidArgumentError(f"allocation has {len(allocation)} entries for {game.n} players")
    for i, k in enumerate(allocation):
        if not 0 <= k < len(game.actions[i]):
            raise InvalidArgumentError(f"player {i} action index {k} out of range")
    return allocation


def _loads(game: GameInstance, allocation: Allocation) -> np.ndarray:
    _, masks, _, _, _ = game.arrays
    return masks[np.arange(game.n), allocation].sum(axis=0, dtype=np.int64)


def load_profile(game: GameInstance, allocation: Sequence[int]) -> dict[str, int]:
    allocation = _check(game, allocation)
    loads = _loads(game, allocation)
    return {rid: int(loads[k]) for k, (rid, _) in enumerate(game.resources)}


def welfare(game: GameInstance, allocation: Sequence[int]) -> float:
    allocation = _check(game, allocation)
    values, _, _, wpad, _ = game.arrays
    return float(values @ wpad[_loads(game, allocation)])


def utility(game: GameInstance, player: int, allocation: Sequence[int]) -> float:
    allocation = _check(game, allocation)
    values, masks, _, _, fpad = game.arrays
    loads = _loads(game, allocation)
    return float((masks[player, allocation[player]] * values) @ fpad[loads])


def potential(game: GameInstance, allocation: Sequence[int]) -> float:
    allocation = _check(game, allocation)
    values, _, _, _, fpad = game.arrays
    cum = np.cumsum(fpad)  # cum[j] = f(1) + ... + f(j)
    return float(values @ cum[_loads(game, allocation)])


def _deviation_utilities(game: GameInstance, player: int, allocation: Allocation) -> np.ndarray:
    values, masks, n_actions, _, fpad = game.arrays
    loads = _loads(game, allocation)
    alt = fpad[loads - masks[player, allocation[player]] + 1] * values
    return masks[player, : n_actions[player]].astype(np.float64) @ alt


def is_nash(game: GameInstance, allocation: Sequence[int], eps: float = EPS_DEV) -> bool:
    """True when no player gains more than ``eps`` by a unilateral deviation."""
    allocation = _check(game, allocation)
    for i in range(game.n):
        u = _deviation_utilities(game, i, allocation)
        if u.max() > u[allocation[i]] + eps:
            return False
    return True


def _guard(count: int, what: str):
    if count > MAX_PROFILES:
        raise ResourceLimitError(f"{what}: {count} profiles exceeds the limit of {MAX_PROFILES}")


def _evaluate(game: GameInstance, eps: float = EPS_DEV):
    _guard(game.n_profiles, "exhaustive enumeration")
    values, masks, n_actions, wpad, fpad = game.arrays
    return kernels.evaluate_profiles(values, masks, n_actions, wpad, fpad, eps)


def enumerate_equilibria(game: GameInstance) -> list[Allocation]:
    """All pure Nash equilibria, in profile order."""
    _, nash, _ = _evaluate(game)
    return [game.allocation(int(p)) for p in np.flatnonzero(nash)]


def best_response_dynamics(
    game: GameInstance, start: Sequence[int], max_rounds: int = 10_000
) -> Allocation:
    """Round-robin best responses; lowest index wins ties; stops after a silent round."""
    current = list(_check(game, start))
    for _ in range(max_rounds):
        moved = False
        for i in range(game.n):
            u = _deviation_utilities(game, i, tuple(current))
            best = int(np.argmax(u))
            if u[best] > u[current[i]] + EPS_DEV:
                current[i] = best
                moved = True
        if not moved:
            return tuple(current)
    raise ResourceLimitError(f"best-response dynamics did not settle in {max_rounds} rounds")


def poa_of_game(game: GameInstance) -> float:
    """Worst equilibrium welfare over optimal welfare."""
    wel, nash, _ = _evaluate(game)
    best = wel.max()
    if not best > 0:
        raise PreconditionError("the game's optimal welfare is zero; its PoA is undefined")
    return float(wel[nash].min() / best)


@dataclass(frozen=True)
class SmoothnessResult:
    holds: bool
    worst_violation: float
    witness_pair: tuple[Allocation, Allocation] | None


def check_smoothness(game: GameInstance, lam: float, mu: float) -> SmoothnessResult:
    """Exhaustively test sum_i U_i(a'_i, a_-i) >= lam W(a') - mu W(a) over all pairs.

    ``worst_violation`` is the largest lam W(a') - mu W(a) - sum_i U_i(a'_i, a_-i);
    the witness pair (a, a') attains it.
    """
    if lam < 0 or mu < 0:
        raise InvalidArgumentError("smoothness parameters must be non-negative")
    P = game.n_profiles
    _guard(P * P, "smoothness check")
    values, masks, n_actions, wpad, fpad = game.arrays
    wel, udev = kernels.deviation_table(values, masks, n_actions, wpad, fpad)
    # profile digits, shape (P, n)
    digits = np.array([game.allocation(p) for p in range(P)], dtype=np.intp)
    players = np.arange(game.n)
    worst, pair = -np.inf, None
    for p in range(P):
        # dev[q] = sum_i udev[p, i, digits[q, i]]
        dev = udev[p, players, digits].sum(axis=1)
        viol = lam * wel - mu * wel[p] - dev
        q = int(np.argmax(viol))
        if viol[q] > worst:
            worst, pair = float(viol[q]), (game.allocation(p), game.allocation(q))
    holds = worst <= TAU_FEAS
    return SmoothnessResult(holds, worst, None if holds else pair)


def budget_balance_gap(game: GameInstance) -> tuple[float, float]:
    """(max, min) over allocations of W(a) - sum_i U_i(a)."""
    wel, _, usum = _evaluate(game)
    gap = wel - usum
    return float(gap.max()), float(gap.min())


def nonpositive_f1_game(w, f) -> tuple[GameInstance, Allocation]:
    """One agent choosing between a unit-value and a zero-value resource.

    Picking the worthless resource is an equilibrium whenever f(1) <= 0.
    """
    w, f = as_basis(w), as_mechanism(f)
    game = GameInstance(
        (("r1", 1.0), ("r2", 0.0)),
        ((frozenset({"r1"}), frozenset({"r2"})),),
        w, f,
    )
    return game, (1,)
