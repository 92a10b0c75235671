"""Brute-force validation: the efficiency ratio of every game in a finite family
must be at least the LP price of anarchy, and the worst family member shows
how close the bound comes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement
from typing import Iterator, Sequence

import numpy as np

from . import kernels
from .core import as_basis, as_mechanism
from .errors import InvalidArgumentError, PreconditionError, ResourceLimitError
from .games import EPS_DEV, GameInstance, poa_of_game

__all__ = ["FamilySpec", "OracleResult", "brute_force_poa", "family_games", "family_size"]

MAX_PROFILES_PER_GAME = 10**6


@dataclass(frozen=True)
class FamilySpec:
    """A finite family of games with ``n`` players over at most ``max_resources``.

    Exhaustive families list every multiset of resource values from
    ``value_grid`` and every assignment of action sets (distinct subsets,
    at most ``max_actions_per_player`` of them) to players, up to relabeling
    of players and resources. Sampled families draw ``sample_count`` games;
    game ``k`` uses its own Philox stream keyed by ``(seed, k)``.
    """

    n: int
    max_resources: int
    max_actions_per_player: int = 2
    value_grid: tuple[float, ...] = (0.0, 0.5, 1.0, 2.0)
    include_empty_action: bool = True
    exhaustive: bool = True
    sample_count: int = 0
    seed: int = 0
    max_games: int = 2_000_000

    def __post_init__(self):
        if self.n < 1 or self.max_resources < 1 or self.max_actions_per_player < 1:
            raise InvalidArgumentError("n, max_resources and max_actions_per_player must be >= 1")
        if any(v < 0 for v in self.value_grid) or not self.value_grid:
            raise InvalidArgumentError("value_grid must be a non-empty set of non-negative reals")
        if self.max_actions_per_player ** self.n > MAX_PROFILES_PER_GAME:
            raise ResourceLimitError("family games would exceed 10^6 joint profiles")
        if not self.exhaustive and self.sample_count < 1:
            raise InvalidArgumentError("sampled families need sample_count >= 1")
        if not 0 <= self.seed < 2**64:
            raise InvalidArgumentError("seed must fit in 64 bits")

    def subsets(self) -> list[int]:
        start = 0 if self.include_empty_action else 1
        subs = range(start, 2**self.max_resources)
        return sorted(subs, key=lambda s: (bin(s).count("1"), s))

    def action_sets(self) -> list[tuple[int, ...]]:
        subs = self.subsets()
        k_max = min(self.max_actions_per_player, len(subs))
        return [c for k in range(1, k_max + 1) for c in combinations(subs, k)]


def family_size(spec: FamilySpec) -> int:
    if not spec.exhaustive:
        return spec.sample_count
    n_values = math.comb(len(set(spec.value_grid)) + spec.max_resources - 1, spec.max_resources)
    n_sets = len(spec.action_sets())
    return n_values * math.comb(n_sets + spec.n - 1, spec.n)


@dataclass
class OracleResult:
    min_ratio: float
    argmin_game: GameInstance | None
    games_checked: int
    games_skipped: int = 0

    def to_dict(self, lp_poa: float | None = None) -> dict:
        return {
            "min_ratio": self.min_ratio,
            "lp_poa": lp_poa,
            "games_checked": self.games_checked,
            "argmin_game": None if self.argmin_game is None else self.argmin_game.to_dict(),
        }


def _mask_table(action_sets, m, kmax):
    table = np.zeros((len(action_sets), kmax, m), dtype=np.uint8)
    for s, acts in enumerate(action_sets):
        for k, bits in enumerate(acts):
            for r in range(m):
                if bits >> r & 1:
                    table[s, k, r] = 1
    sizes = np.array([len(a) for a in action_sets], dtype=np.intp)
    return table, sizes


def _exhaustive(spec: FamilySpec) -> Iterator[tuple[np.ndarray, list[tuple[int, ...]]]]:
    grid = sorted(set(float(v) for v in spec.value_grid))
    sets = spec.action_sets()
    value_vectors = [np.array(v) for v in combinations_with_replacement(grid, spec.max_resources)]
    for players in combinations_with_replacement(range(len(sets)), spec.n):
        acts = [sets[s] for s in players]
        for values in value_vectors:
            yield values, acts


def _sampled(spec: FamilySpec) -> Iterator[tuple[np.ndarray, list[tuple[int, ...]]]]:
    grid = np.array(sorted(set(float(v) for v in spec.value_grid)))
    subs = spec.subsets()
    for k in range(spec.sample_count):
        rng = np.random.Generator(np.random.Philox(key=spec.seed + (k << 64)))
        values = rng.choice(grid, size=spec.max_resources)
        acts = []
        for _ in range(spec.n):
            count = int(rng.integers(1, min(spec.max_actions_per_player, len(subs)) + 1))
            picks = rng.choice(len(subs), size=count, replace=False)
            acts.append(tuple(subs[p] for p in sorted(picks)))
        yield values, acts


def _as_game(values, acts, m, w, f, n) -> GameInstance:
    resources = tuple((f"r{r + 1}", float(values[r])) for r in range(m))
    actions = tuple(
        tuple(frozenset(f"r{r + 1}" for r in range(m) if bits >> r & 1) for bits in player)
        for player in acts
    )
    return GameInstance(resources, actions, w, f, n)


def family_games(f, w, spec: FamilySpec) -> Iterator[GameInstance]:
    """Every game of the family as a GameInstance, in enumeration order."""
    f = as_mechanism(f).truncate(spec.n)
    w = as_basis(w).truncate(spec.n)
    stream = _exhaustive(spec) if spec.exhaustive else _sampled(spec)
    for values, acts in stream:
        yield _as_game(values, acts, spec.max_resources, w, f, spec.n)


def brute_force_poa(
    f, w, spec: FamilySpec, extra_games: Sequence[GameInstance] = ()
) -> OracleResult:
    """Minimum efficiency ratio (worst equilibrium / optimum) over the family.

    Games whose optimal welfare is zero are skipped. ``extra_games`` are
    evaluated as well, e.g. a witness game to check that the bound is reached.
    """
    n = spec.n
    f = as_mechanism(f).truncate(n)
    w = as_basis(w).truncate(n)
    if f(1) <= 0:
        raise PreconditionError("brute-force oracle needs f(1) > 0")
    if family_size(spec) > spec.max_games:
        raise ResourceLimitError(
            f"family has {family_size(spec)} games, above max_games = {spec.max_games}"
        )
    m = spec.max_resources
    fpad, wpad = f.padded(), w.padded()
    kmax = spec.max_actions_per_player
    table, sizes = _mask_table(spec.action_sets(), m, kmax)
    set_index = {a: s for s, a in enumerate(spec.action_sets())}

    best, best_case = math.inf, None
    checked = skipped = 0
    stream = _exhaustive(spec) if spec.exhaustive else _sampled(spec)
    for values, acts in stream:
        idx = [set_index[a] for a in acts]
        wel, nash, _ = kernels.evaluate_profiles(
            values, table[idx], sizes[idx], wpad, fpad, EPS_DEV
        )
        top = wel.max()
        if not top > 0:
            skipped += 1
            continue
        checked += 1
        ratio = wel[nash].min() / top
        if ratio < best:
            best, best_case = float(ratio), (values, acts)

    argmin = None if best_case is None else _as_game(*best_case, m, w, f, n)
    for game in extra_games:
        try:
            ratio = poa_of_game(game)
        except PreconditionError:
            skipped += 1
            continue
        checked += 1
        if ratio < best:
            best, argmin = ratio, game
    return OracleResult(best, argmin, checked, skipped)
