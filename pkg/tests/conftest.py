import numpy as np
import pytest

from poalp.core import Mechanism, WelfareBasis, preset_mechanism, preset_welfare
from poalp.games import GameInstance

_ACCEPTANCE_LINES = []


def random_instance(rng, n_max=8, f_lo=-1.0, f_hi=2.0):
    """(f, w, n) with f(1) > 0, w(j) in (0.1, 2], f(j) in [f_lo, f_hi]."""
    n = int(rng.integers(1, n_max + 1))
    w = WelfareBasis(tuple(rng.uniform(0.1, 2.0, n)))
    f1 = rng.uniform(0.05, f_hi)
    f = Mechanism((f1, *rng.uniform(f_lo, f_hi, n - 1)))
    return f, w, n


def random_game(rng, n, m, kmax, w, f, values=(0.0, 0.5, 1.0, 2.0)):
    resources = tuple((f"r{k}", float(rng.choice(values))) for k in range(m))
    actions = []
    for _ in range(n):
        count = int(rng.integers(1, kmax + 1))
        picks = rng.choice(2**m, size=min(count, 2**m), replace=False)
        actions.append(
            tuple(frozenset(f"r{k}" for k in range(m) if int(bits) >> k & 1) for bits in picks)
        )
    return GameInstance(resources, tuple(actions), w, f, n)


@pytest.fixture
def covering():
    return lambda n: preset_welfare("covering", n)


@pytest.fixture
def es_covering():
    def make(n):
        w = preset_welfare("covering", n)
        return preset_mechanism("equal_share", n, w), w

    return make


@pytest.fixture
def rng():
    return np.random.default_rng(20240101)


@pytest.fixture
def acceptance_line():
    def emit(tag, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] {tag}: {detail}"
        print(line)
        _ACCEPTANCE_LINES.append(line)
        return ok

    return emit


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
