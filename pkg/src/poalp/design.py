"""Mechanism design: the f maximizing PoA(f, w, n) via one linear program."""

from __future__ import annotations

from dataclasses import dataclass

from .core import Mechanism, WelfareBasis, as_basis, as_mechanism, enumerate_boundary_set
from .errors import InternalError, InvalidArgumentError
from .lpsolve import LpProblem, solve_lp

__all__ = ["DesignResult", "build_design", "optimize_mechanism", "rescale_mechanism"]


@dataclass(frozen=True)
class DesignResult:
    f_opt: Mechanism
    mu_opt: float
    poa_opt: float

    def to_dict(self) -> dict:
        return {"f_opt": self.f_opt.to_dict(), "mu_opt": self.mu_opt, "poa_opt": self.poa_opt}


def build_design(w: WelfareBasis, n: int) -> LpProblem:
    """min mu over free f(1..n), mu with f(1) >= 1 and, for every boundary triple,
    w(b+x) - mu w(a+x) + a f(a+x) - b f(a+x+1) <= 0."""
    w = as_basis(w).truncate(n)
    names = [f"f{j}" for j in range(1, n + 1)] + ["mu"]
    lp = LpProblem("min", names, [0.0] * n + [1.0], free=set(names))

    def col(j):  # variable index of f(j); None for the zero padding
        return j - 1 if 1 <= j <= n else None

    for t in enumerate_boundary_set(n):
        row = [0.0] * (n + 1)
        row[n] = -w(t.a + t.x)
        j = t.a + t.x
        if t.a and col(j) is not None:
            row[col(j)] += t.a
        if t.b and col(j + 1) is not None:
            row[col(j + 1)] -= t.b
        lp.add(row, "<=", -w(t.b + t.x), f"{t.a},{t.x},{t.b}")
    lp.add([1.0] + [0.0] * n, ">=", 1.0, "f1>=1")
    return lp


def optimize_mechanism(w, n: int) -> DesignResult:
    """Mechanism with the best price of anarchy for basis ``w`` and up to ``n`` agents.

    The basis is first divided by w(1). PoA is unchanged by rescaling either w
    or f, and after the division the normalization f(1) >= 1 coincides with the
    row the (0, 0, 1) triple already imposes, so it never cuts off an optimizer.
    The returned f is the optimizer for that normalized basis.
    """
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InvalidArgumentError(f"n must be a positive integer, got {n!r}")
    w = as_basis(w).truncate(n)
    wn = w.scaled(1.0 / w(1))
    sol = solve_lp(build_design(wn, n))
    if sol.status != "optimal":
        raise InternalError(f"design program returned {sol.status}; its minimum is attained")
    f_opt = Mechanism(tuple(sol.variable_values[f"f{j}"] for j in range(1, n + 1)))
    mu = sol.variable_values["mu"]
    return DesignResult(f_opt, mu, 1.0 / mu)


def rescale_mechanism(f, alpha: float) -> Mechanism:
    if not alpha > 0:
        raise InvalidArgumentError(f"alpha must be positive, got {alpha!r}")
    f = as_mechanism(f)
    return Mechanism(tuple(alpha * v for v in f.values))
