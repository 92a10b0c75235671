"""Acceptance criteria, one test each. Every test prints a PASS/FAIL line and
the lines are repeated in the terminal summary."""

import math
import time

import numpy as np

from conftest import random_instance
from poalp.core import (
    Mechanism,
    enumerate_boundary_set,
    enumerate_index_set,
    preset_mechanism,
    preset_welfare,
)
from poalp.design import optimize_mechanism
from poalp.games import budget_balance_gap, check_smoothness, is_nash, load_profile, poa_of_game
from poalp.oracle import FamilySpec, brute_force_poa, family_games
from poalp.poa import explicit_wstar, lambda_star, poa, poa_value, solve_dual, solve_primal
from poalp.witness import build_worst_case, resource_id

E_BOUND = 1 - 1 / math.e


def cover(n):
    return preset_welfare("covering", n)


def mech(name, n, w):
    return preset_mechanism(name, n, w.truncate(n))


def test_ac01_strong_duality(acceptance_line):
    start = time.perf_counter()
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(50):
        f, w, n = random_instance(rng)
        p = solve_primal(f, w, n).w_star
        full = solve_dual(f, w, n, "full_I").mu_star
        bnd = solve_dual(f, w, n, "boundary_I_R").mu_star
        gap = max(abs(p - full), abs(p - bnd), abs(full - bnd)) / max(1.0, p)
        worst = max(worst, gap)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and elapsed < 30
    acceptance_line("AC1 strong duality", ok, f"max rel gap {worst:.2e}, {elapsed:.2f}s")
    assert ok


def test_ac02_equal_share_closed_form(acceptance_line):
    start = time.perf_counter()
    worst = max(abs(poa_value(mech("es", n, cover(n)), cover(n), n) - n / (2 * n - 1)) for n in range(1, 11))
    o2 = brute_force_poa(
        mech("es", 2, cover(2)), cover(2), FamilySpec(2, 3, 2, (0.0, 1.0))
    ).min_ratio
    o3 = brute_force_poa(
        mech("es", 3, cover(3)), cover(3), FamilySpec(3, 3, 2, (0.0, 1.0, 3.0))
    ).min_ratio
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and abs(o2 - 2 / 3) <= 1e-6 and abs(o3 - 3 / 5) <= 1e-6 and elapsed < 60
    acceptance_line(
        "AC2 equal-share n/(2n-1)", ok,
        f"max err {worst:.1e}; oracle n=2 {o2:.6f}, n=3 {o3:.6f}; {elapsed:.2f}s",
    )
    assert ok


def test_ac03_marginal_contribution(acceptance_line):
    worst = max(abs(poa_value(mech("mc", n, cover(n)), cover(n), n) - 0.5) for n in range(2, 11))
    o2 = brute_force_poa(mech("mc", 2, cover(2)), cover(2), FamilySpec(2, 3, 2, (0.0, 1.0))).min_ratio
    ok = worst <= 1e-6 and abs(o2 - 0.5) <= 1e-6
    acceptance_line("AC3 marginal contribution 1/2", ok, f"max err {worst:.1e}; oracle n=2 {o2:.6f}")
    assert ok


def test_ac04_gairing(acceptance_line):
    values = [poa_value(mech("gairing", n, cover(n)), cover(n), n) for n in range(1, 21)]
    monotone = all(b <= a + 1e-9 for a, b in zip(values, values[1:]))
    above = min(values) >= E_BOUND - 1e-9
    gap = abs(values[-1] - E_BOUND)
    ok = monotone and above and gap <= 0.02
    acceptance_line(
        "AC4 gairing", ok,
        f"non-increasing={monotone}, min {min(values):.12f}, |poa(20)-(1-1/e)| = {gap:.2e}",
    )
    assert ok


def test_ac05_design_dominance(acceptance_line):
    worst = math.inf
    cover_ok = True
    for name, p in (("covering", None), ("coverage", 0.3), ("coverage", 0.7)):
        for n in range(1, 11):
            w = preset_welfare(name, n, p)
            opt = optimize_mechanism(w, n).poa_opt
            rivals = [poa_value(mech(m, n, w), w, n) for m in ("es", "mc")]
            if name == "covering":
                g = poa_value(mech("gairing", n, w), w, n)
                rivals.append(g)
                cover_ok &= opt >= E_BOUND - 1e-6
            worst = min(worst, opt - max(rivals))
    ok = worst >= -1e-6 and cover_ok
    acceptance_line("AC5 design dominance", ok, f"min(poa_opt - best rival) = {worst:.2e}, covering >= 1-1/e: {cover_ok}")
    assert ok


def test_ac06_witness_tightness(acceptance_line):
    rng = np.random.default_rng(6)
    worst, all_nash, loads_exact = 0.0, True, True
    for _ in range(25):
        f, w, n = random_instance(rng, n_max=6)
        primal = solve_primal(f, w, n)
        wit = build_worst_case(primal.theta, f, w, n)
        all_nash &= is_nash(wit.game, wit.designated_equilibrium)
        worst = max(worst, abs(wit.predicted_ratio - poa_value(f, w, n)))
        eq = load_profile(wit.game, wit.designated_equilibrium)
        opt = load_profile(wit.game, wit.designated_optimum)
        for t in primal.support:
            for j in range(1, n + 1):
                rid = resource_id(t, j)
                loads_exact &= eq[rid] == t.a + t.x and opt[rid] == t.b + t.x
    ok = worst <= 1e-6 and all_nash and loads_exact
    acceptance_line(
        "AC6 witness tightness", ok,
        f"max |ratio - poa| {worst:.1e}, nash={all_nash}, loads exact={loads_exact}",
    )
    assert ok


def test_ac07_oracle_soundness(acceptance_line):
    configs = []
    rng = np.random.default_rng(7)
    for name in ("es", "mc", "gairing"):
        for n in (2, 3):
            configs.append((mech(name, n, cover(n)), cover(n), n))
    for _ in range(6):
        f, w, n = random_instance(rng, n_max=3)
        configs.append((f, w, n))
    slack, closed = math.inf, 0.0
    for f, w, n in configs:
        lp = poa_value(f, w, n)
        if n == 1:
            spec = FamilySpec(1, 3, 3, (0.0, 1.0, 2.0))
        else:
            spec = FamilySpec(n, 3 if n == 2 else 2, 2, (0.0, 1.0, 2.0))
        res = brute_force_poa(f, w, spec)
        slack = min(slack, res.min_ratio - lp)
        wit = build_worst_case(solve_primal(f, w, n).theta, f, w, n)
        inj = brute_force_poa(f, w, spec, extra_games=[wit.game])
        closed = max(closed, abs(inj.min_ratio - lp))
    ok = slack >= -1e-9 and closed <= 1e-6
    acceptance_line(
        "AC7 oracle soundness", ok,
        f"{len(configs)} configs, min(oracle - lp) = {slack:.2e}, gap after injection {closed:.1e}",
    )
    assert ok


def test_ac08_degenerate(acceptance_line, monkeypatch):
    import sys

    mod = sys.modules["poalp.poa"]
    calls = []
    real = mod.solve_lp
    monkeypatch.setattr(mod, "solve_lp", lambda lp: calls.append(lp) or real(lp))
    zero = [poa(Mechanism(f), cover(2), 2).poa for f in ((-1.0, 5.0), (0.0, 1.0))]
    no_lp = not calls
    rng = np.random.default_rng(8)
    n1 = 0.0
    for _ in range(20):
        f, w, _ = random_instance(rng)
        n1 = max(n1, abs(poa_value(f, w, 1) - 1.0))
    scale = 0.0
    for _ in range(10):
        f, w, n = random_instance(rng, n_max=6)
        base = poa_value(f, w, n)
        for alpha in (0.5, 2.0, 10.0):
            scaled = Mechanism(tuple(alpha * v for v in f.values))
            scale = max(scale, abs(poa_value(scaled, w, n) - base))
    ok = zero == [0.0, 0.0] and no_lp and n1 <= 1e-9 and scale <= 1e-9
    acceptance_line(
        "AC8 degenerate cases", ok,
        f"f(1)<=0 -> {zero} without LP={no_lp}; n=1 err {n1:.1e}; scaling err {scale:.1e}",
    )
    assert ok


def test_ac09_corollary_explicit(acceptance_line):
    cor, expl, checked = 0.0, 0.0, 0
    for name, p in (("covering", None), ("coverage", 0.3), ("coverage", 0.7)):
        for n in range(1, 11):
            w = preset_welfare(name, n, p)
            names = ("es", "mc", "gairing") if name == "covering" else ("es", "mc")
            for m in names:
                f = mech(m, n, w)
                ref = solve_dual(f, w, n).mu_star
                cor = max(cor, abs(poa(f, w, n, "corollary").w_star - ref))
                lam, holds = lambda_star(f, w, n)
                if holds:
                    checked += 1
                    expl = max(expl, abs(explicit_wstar(f, w, n, lam) - ref))
    es_lambda = all(lambda_star(mech("es", n, cover(n)), cover(n), n) == (1.0, True) for n in range(1, 13))
    ok = cor <= 1e-6 and expl <= 1e-6 and es_lambda
    acceptance_line(
        "AC9 corollary/explicit", ok,
        f"corollary err {cor:.1e}, explicit err {expl:.1e} over {checked} cases, es lambda*=1: {es_lambda}",
    )
    assert ok


def test_ac10_smoothness_budget(acceptance_line):
    worst, budget, games = -math.inf, 0.0, 0
    for n, spec in ((2, FamilySpec(2, 3, 2, (0.0, 1.0))), (3, FamilySpec(3, 2, 2, (0.0, 1.0, 2.0)))):
        w = cover(n)
        f = mech("es", n, w)
        for g in family_games(f, w, spec):
            games += 1
            res = check_smoothness(g, 1.0, 1.0 - 1.0 / n)
            worst = max(worst, res.worst_violation)
            hi, lo = budget_balance_gap(g)
            budget = max(budget, abs(hi), abs(lo))
    identity = all(
        j * mech("es", n, cover(n))(j) == cover(n)(j) for n in range(1, 21) for j in range(1, n + 1)
    )
    ok = worst <= 1e-9 and budget <= 1e-12 and identity
    acceptance_line(
        "AC10 smoothness & budget balance", ok,
        f"{games} games, worst violation {worst:.1e}, max |gap| {budget:.1e}, j f(j) = w(j): {identity}",
    )
    assert ok


def test_ac11_cardinalities(acceptance_line):
    bad = []
    for n in range(1, 13):
        full, bnd = enumerate_index_set(n), enumerate_boundary_set(n)
        if len(full) != (n + 1) * (n + 2) * (n + 3) // 6 - 1 or len(bnd) != 2 * n * n + 1:
            bad.append(n)
        if not set(bnd) <= set(full):
            bad.append(n)
    ok = not bad
    acceptance_line("AC11 cardinalities", ok, "n = 1..12 exact" if ok else f"mismatch at n = {bad}")
    assert ok
