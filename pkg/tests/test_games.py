import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_game
from poalp import kernels
from poalp.core import Mechanism, WelfareBasis, preset_mechanism, preset_welfare
from poalp.errors import InvalidArgumentError, PreconditionError, ResourceLimitError
from poalp.games import (
    GameInstance,
    best_response_dynamics,
    budget_balance_gap,
    check_smoothness,
    enumerate_equilibria,
    is_nash,
    load_profile,
    nonpositive_f1_game,
    poa_of_game,
    potential,
    utility,
    welfare,
)
from poalp.poa import poa_value

COVER = preset_welfare("covering", 4)
ES = preset_mechanism("es", 4, COVER)
MC = preset_mechanism("mc", 4, COVER)


def game(resources, actions, w=COVER, f=ES):
    return GameInstance(
        tuple(resources.items()),
        tuple(tuple(frozenset(a) for a in acts) for acts in actions),
        w, f,
    )


def naive(g):
    """Independent reference: per-profile welfare, utilities and Nash flags from dicts."""
    vals = dict(g.resources)
    out = []
    for prof in itertools.product(*(range(len(a)) for a in g.actions)):
        chosen = [g.actions[i][k] for i, k in enumerate(prof)]

        def loads_of(choice):
            cnt = {r: 0 for r in vals}
            for act in choice:
                for r in act:
                    cnt[r] += 1
            return cnt

        load = loads_of(chosen)
        wel = sum(vals[r] * g.w(c) for r, c in load.items() if c)
        util = [sum(vals[r] * g.f(load[r]) for r in act) for act in chosen]
        nash = True
        for i, acts in enumerate(g.actions):
            for alt in acts:
                dev = chosen[:i] + [alt] + chosen[i + 1:]
                dl = loads_of(dev)
                if sum(vals[r] * g.f(dl[r]) for r in alt) > util[i] + 1e-9:
                    nash = False
        out.append((prof, wel, util, nash))
    return out


def test_load_profile_examples():
    g = game({"r1": 1, "r2": 1}, [[{"r1"}, {"r1", "r2"}], [{"r1"}, set()], [{"r2"}]])
    assert load_profile(g, (0, 0, 0)) == {"r1": 2, "r2": 1}
    assert load_profile(g, (1, 1, 0)) == {"r1": 1, "r2": 2}
    g2 = game({"r1": 1, "r2": 1}, [[{"r1", "r2"}], [set()]])
    assert load_profile(g2, (0, 0)) == {"r1": 1, "r2": 1}
    g3 = game({"r1": 1, "r2": 1}, [[{"r1"}], [{"r1", "r2"}], [{"r2"}]])
    assert load_profile(g3, (0, 0, 0)) == {"r1": 2, "r2": 2}
    with pytest.raises(InvalidArgumentError):
        load_profile(g, (2, 0, 0))
    with pytest.raises(InvalidArgumentError):
        load_profile(g, (0, 0))


def test_welfare_examples():
    g = game({"r1": 1, "r2": 1}, [[{"r1"}], [{"r1"}]])
    assert welfare(g, (0, 0)) == 1.0
    cov = preset_welfare("coverage", 2, 0.5)
    g = game({"r": 2}, [[{"r"}], [{"r"}]], w=cov, f=preset_mechanism("es", 2, cov))
    assert welfare(g, (0, 0)) == pytest.approx(1.5)
    g = game({"r": 2}, [[set()], [set()]])
    assert welfare(g, (0, 0)) == 0.0


def test_utility_examples():
    g = game({"r1": 1}, [[{"r1"}], [{"r1"}]])
    assert utility(g, 0, (0, 0)) == utility(g, 1, (0, 0)) == 0.5
    assert utility(g, 0, (0, 0)) + utility(g, 1, (0, 0)) == welfare(g, (0, 0))
    g = game({"r1": 1}, [[{"r1"}], [{"r1"}]], f=MC)
    assert utility(g, 0, (0, 0)) == 0.0
    g = game({"r": 3}, [[{"r"}]])
    assert utility(g, 0, (0,)) == 3.0


def test_potential_examples():
    g = game({"r": 1}, [[{"r"}], [{"r"}]], f=Mechanism((1.0, 0.5, 0.0, 0.0)))
    assert potential(g, (0, 0)) == 1.5
    g = game({"r": 1}, [[set()], [set()]])
    assert potential(g, (0, 0)) == 0.0


def test_is_nash_examples():
    g = game({"a": 1, "b": 3}, [[{"a"}, {"b"}]])
    assert is_nash(g, (1,)) and not is_nash(g, (0,))
    one_agent, eq = nonpositive_f1_game(COVER, Mechanism((0.0, 1.0)))
    assert is_nash(one_agent, eq)
    assert poa_of_game(one_agent) == 0.0
    # es covering: player 1 sits with player 2 on r1 while r2 is free; deviating gains 0.5
    g = game({"r1": 1, "r2": 1}, [[{"r1"}, {"r2"}], [{"r1"}]])
    assert not is_nash(g, (0, 0))


def test_enumerate_examples():
    g = game({"a": 1, "b": 3}, [[{"a"}, {"b"}]])
    assert enumerate_equilibria(g) == [(1,)]
    g = game({"r1": 1, "r2": 1}, [[{"r1"}, {"r2"}], [{"r1"}, {"r2"}]])
    eqs = enumerate_equilibria(g)
    assert (0, 1) in eqs and (1, 0) in eqs


def test_duplicate_rejected():
    data = game({"r1": 1}, [[{"r1"}]]).to_dict()
    data["actions"] = [[["r1", "r1"]]]
    with pytest.raises(InvalidArgumentError):
        GameInstance.from_dict(data)
    with pytest.raises(InvalidArgumentError):
        game({"r1": 1}, [[{"r2"}]])
    with pytest.raises(InvalidArgumentError):
        game({"r1": -1}, [[{"r1"}]])
    with pytest.raises(InvalidArgumentError):
        game({"r1": 1}, [[]])


def test_json_round_trip():
    g = game({"r1": 1, "r2": 0.5}, [[{"r1"}, {"r1", "r2"}], [set()]])
    again = GameInstance.from_dict(g.to_dict())
    assert again == g
    assert again.to_dict() == g.to_dict()


def test_brd_examples():
    g = game({"a": 1, "b": 3}, [[{"a"}, {"b"}]])
    assert best_response_dynamics(g, (0,)) == (1,)
    g = game({"r1": 1, "r2": 1}, [[{"r1"}, {"r2"}], [{"r1"}, {"r2"}]])
    assert best_response_dynamics(g, (0, 1)) == (0, 1)


def test_smoothness_examples():
    g = game({"r1": 1, "r2": 1}, [[{"r1"}, {"r2"}], [{"r1"}, {"r2"}]])
    assert check_smoothness(g, 1, 0.5).holds
    assert check_smoothness(g, 0, 0).holds
    # mc: both on r1 gives utilities 0 against an optimum covering both
    g = game({"r1": 1, "r2": 1}, [[{"r1"}], [{"r1"}, {"r2"}]], f=MC)
    res = check_smoothness(g, 1, 0)
    assert not res.holds and res.witness_pair is not None
    a, a_prime = res.witness_pair
    dev = sum(utility(g, i, a[:i] + (a_prime[i],) + a[i + 1:]) for i in range(g.n))
    assert welfare(g, a_prime) - dev == pytest.approx(res.worst_violation)
    with pytest.raises(InvalidArgumentError):
        check_smoothness(g, -1, 0)


def test_budget_examples():
    g = game({"r1": 1}, [[{"r1"}], [{"r1"}]], f=MC)
    assert budget_balance_gap(g) == (1.0, 1.0)
    g = game({"r1": 1}, [[set()], [set()]])
    assert budget_balance_gap(g) == (0.0, 0.0)


def test_size_guard(monkeypatch):
    import poalp.games as mod

    monkeypatch.setattr(mod, "MAX_PROFILES", 3)
    g = game({"r1": 1, "r2": 1}, [[{"r1"}, {"r2"}], [{"r1"}, {"r2"}]])
    with pytest.raises(ResourceLimitError):
        enumerate_equilibria(g)
    with pytest.raises(ResourceLimitError):
        check_smoothness(g, 1, 1)


def test_zero_welfare_game():
    g = game({"r1": 0}, [[{"r1"}]])
    with pytest.raises(PreconditionError):
        poa_of_game(g)


def _corpus(count, seed=0):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(1, 4))
        m = int(rng.integers(1, 5))
        w = WelfareBasis(tuple(rng.uniform(0.1, 2.0, n)))
        f = Mechanism((rng.uniform(0.05, 2.0), *rng.uniform(-1.0, 2.0, n - 1)))
        yield random_game(rng, n, m, 3, w, f)


CORPUS = list(_corpus(100))


@pytest.mark.parametrize("k", range(100))
def test_random_game_properties(k):
    g = CORPUS[k]
    ref = naive(g)
    eqs = enumerate_equilibria(g)
    assert eqs == [prof for prof, _, _, nash in ref if nash]
    assert eqs  # potential game: an equilibrium exists
    for prof, wel, util, _ in ref:
        assert welfare(g, prof) == pytest.approx(wel, abs=1e-12)
        phi = potential(g, prof)
        for i in range(g.n):
            assert utility(g, i, prof) == pytest.approx(util[i], abs=1e-12)
            for k2 in range(len(g.actions[i])):
                dev = prof[:i] + (k2,) + prof[i + 1:]
                du = utility(g, i, prof) - utility(g, i, dev)
                assert du == pytest.approx(phi - potential(g, dev), abs=1e-12)
    top = max(wel for _, wel, _, _ in ref)
    if top > 0:
        assert all(welfare(g, a) > 0 for a in eqs)
        assert poa_of_game(g) >= poa_value(g.f, g.w, g.n) - 1e-9
    start = tuple(0 for _ in range(g.n))
    assert is_nash(g, best_response_dynamics(g, start))


@pytest.mark.parametrize("k", range(0, 100, 5))
def test_backends_agree(k):
    g = CORPUS[k]
    args = g.arrays
    py = kernels.backends()["python"]
    for name, mod in kernels.backends().items():
        wel, nash, usum = mod.evaluate_profiles(*args, 1e-9)
        wel0, nash0, usum0 = py.evaluate_profiles(*args, 1e-9)
        np.testing.assert_allclose(wel, wel0, atol=1e-12)
        np.testing.assert_array_equal(nash, nash0)
        np.testing.assert_allclose(usum, usum0, atol=1e-12)
        wel, udev = mod.deviation_table(*args)
        wel0, udev0 = py.deviation_table(*args)
        np.testing.assert_allclose(wel, wel0, atol=1e-12)
        np.testing.assert_array_equal(np.isinf(udev), np.isinf(udev0))
        fin = np.isfinite(udev0)
        np.testing.assert_allclose(udev[fin], udev0[fin], atol=1e-12)
        assert mod.n_profiles(args[2]) == g.n_profiles


def test_backend_selected():
    assert kernels.BACKEND in kernels.backends()


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(1, 3),
    values=st.lists(st.sampled_from([0.0, 0.5, 1.0, 2.0]), min_size=1, max_size=4),
    seed=st.integers(0, 2**32 - 1),
)
def test_es_is_budget_balanced(n, values, seed):
    rng = np.random.default_rng(seed)
    w = preset_welfare("coverage", n, 0.6)
    g = random_game(rng, n, len(values), 3, w, preset_mechanism("es", n, w), tuple(values))
    hi, lo = budget_balance_gap(g)
    assert abs(hi) <= 1e-12 and abs(lo) <= 1e-12


def test_backend_env_override():
    import os
    import subprocess
    import sys

    env = dict(os.environ, POALP_BACKEND="python")
    out = subprocess.run(
        [sys.executable, "-c", "import poalp; print(poalp.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
