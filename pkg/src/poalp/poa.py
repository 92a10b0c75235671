"""Price of anarchy of the class of resource-allocation games with basis w,
mechanism f and at most n agents, computed as a linear program.

Five routes are offered and cross-checked in the tests:

``primal``         max over theta(a,x,b) >= 0, two rows.
``dual_full``      min mu over (lambda >= 0, mu), one row per (a,x,b).
``dual_boundary``  same, restricted to the boundary triples (2n^2 + 1 rows).
``corollary``      (j, l)-indexed rows, valid for non-increasing f.
``explicit``       closed-form max over (j, l) once lambda* is known.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .core import (
    IndexTriple,
    Mechanism,
    WelfareBasis,
    as_basis,
    as_mechanism,
    enumerate_boundary_set,
    enumerate_index_set,
)
from .errors import InternalError, InvalidArgumentError, PreconditionError
from .lpsolve import TAU_FEAS, LpProblem, solve_lp

__all__ = [
    "DualResult",
    "METHODS",
    "PoaReport",
    "PrimalResult",
    "build_dual",
    "build_primal",
    "corollary_constraints",
    "explicit_wstar",
    "lambda_star",
    "poa",
    "solve_corollary",
    "solve_dual",
    "solve_primal",
]

TAU_SUPPORT = 1e-9
METHODS = ("primal", "dual_full", "dual_boundary", "corollary", "explicit")


@dataclass(frozen=True)
class PrimalResult:
    w_star: float
    theta: dict[IndexTriple, float]
    support: tuple[IndexTriple, ...]
    # multipliers of the equilibrium row and the normalization row
    lambda_star: float = float("nan")
    mu_star: float = float("nan")


@dataclass(frozen=True)
class DualResult:
    mu_star: float
    lambda_star: float
    binding_constraints: tuple = ()


@dataclass(frozen=True)
class PoaReport:
    poa: float
    w_star: float | None
    method: str
    n: int
    f: Mechanism
    w: WelfareBasis
    lambda_star: float | None = None
    mu_star: float | None = None
    primal_result: PrimalResult | None = None
    dual_result: DualResult | None = None
    note: str = ""

    def to_dict(self) -> dict:
        theta = None
        if self.primal_result is not None:
            theta = [
                {"a": t.a, "x": t.x, "b": t.b, "value": self.primal_result.theta[t]}
                for t in self.primal_result.support
            ]
        return {
            "poa": self.poa,
            "w_star": self.w_star,
            "lambda_star": self.lambda_star,
            "mu_star": self.mu_star,
            "method": self.method,
            "theta": theta,
            "n": self.n,
        }


def _prepare(f, w, n) -> tuple[Mechanism, WelfareBasis, int]:
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InvalidArgumentError(f"n must be a positive integer, got {n!r}")
    return as_mechanism(f).truncate(n), as_basis(w).truncate(n), n


def _require_positive_f1(f: Mechanism):
    if f(1) <= 0:
        raise PreconditionError(f"f(1) must be positive, got {f(1)}")


def _theta_name(t: IndexTriple) -> str:
    return f"theta({t.a},{t.x},{t.b})"


def build_primal(f, w, n: int) -> LpProblem:
    """LP over theta(a,x,b) >= 0 whose value W* gives PoA = 1/W*.

    Row 0: sum (a f(a+x) - b f(a+x+1)) theta >= 0 (summed equilibrium condition).
    Row 1: sum w(a+x) theta = 1 (equilibrium welfare normalized to one).
    """
    f, w, n = _prepare(f, w, n)
    triples = enumerate_index_set(n)
    lp = LpProblem(
        "max",
        [_theta_name(t) for t in triples],
        [w(t.b + t.x) for t in triples],
    )
    lp.add([t.a * f(t.a + t.x) - t.b * f(t.a + t.x + 1) for t in triples], ">=", 0.0, "equilibrium")
    lp.add([w(t.a + t.x) for t in triples], "=", 1.0, "normalization")
    return lp


def solve_primal(f, w, n: int) -> PrimalResult:
    f, w, n = _prepare(f, w, n)
    _require_positive_f1(f)
    lp = build_primal(f, w, n)
    sol = solve_lp(lp)
    if sol.status != "optimal":
        raise InternalError(
            f"primal PoA program returned {sol.status}; its value is finite whenever f(1) > 0"
        )
    triples = enumerate_index_set(n)
    theta = {t: max(sol.variable_values[_theta_name(t)], 0.0) for t in triples}
    support = tuple(t for t in triples if theta[t] > TAU_SUPPORT)
    return PrimalResult(
        w_star=sol.objective_value,
        theta=theta,
        support=support,
        lambda_star=-sol.dual_values[0],
        mu_star=sol.dual_values[1],
    )


def build_dual(f, w, n: int, constraint_set: str = "boundary_I_R") -> LpProblem:
    """min mu s.t. w(b+x) - mu w(a+x) + lambda (a f(a+x) - b f(a+x+1)) <= 0.

    ``constraint_set`` is ``"full_I"`` (every triple) or ``"boundary_I_R"``.
    """
    f, w, n = _prepare(f, w, n)
    triples = _triples(n, constraint_set)
    lp = LpProblem("min", ["lambda", "mu"], [0.0, 1.0], free={"mu"})
    for t in triples:
        lp.add(
            [t.a * f(t.a + t.x) - t.b * f(t.a + t.x + 1), -w(t.a + t.x)],
            "<=",
            -w(t.b + t.x),
            f"{t.a},{t.x},{t.b}",
        )
    return lp


def _triples(n, constraint_set):
    if constraint_set in ("full_I", "full"):
        return enumerate_index_set(n)
    if constraint_set in ("boundary_I_R", "boundary"):
        return enumerate_boundary_set(n)
    raise InvalidArgumentError(f"unknown constraint set {constraint_set!r}")


def solve_dual(f, w, n: int, constraint_set: str = "boundary_I_R") -> DualResult:
    f, w, n = _prepare(f, w, n)
    _require_positive_f1(f)
    lp = build_dual(f, w, n, constraint_set)
    sol = solve_lp(lp)
    if sol.status != "optimal":
        raise InternalError(f"dual PoA program returned {sol.status}")
    lam, mu = sol.variable_values["lambda"], sol.variable_values["mu"]
    binding = []
    for t in _triples(n, constraint_set):
        c = t.a * f(t.a + t.x) - t.b * f(t.a + t.x + 1)
        slack = w(t.b + t.x) - mu * w(t.a + t.x) + lam * c
        if abs(slack) <= TAU_FEAS * max(1.0, abs(mu), abs(lam)):
            binding.append(t)
    return DualResult(mu_star=mu, lambda_star=lam, binding_constraints=tuple(binding))


def _corollary_rows(f: Mechanism, w: WelfareBasis, n: int):
    """Yield (j, l, coefficient of lambda) with rows mu w(j) >= w(l) + lambda * coef."""
    for j in range(n + 1):
        for l in range(n + 1):
            if j == 0 and l == 0:
                continue
            if j + l <= n:
                coef = j * f(j) - l * f(j + 1)
            else:
                coef = (n - l) * f(j) - (n - j) * f(j + 1)
            yield j, l, coef


def _require_nonincreasing(f: Mechanism):
    for j in range(1, f.n):
        if f.values[j] > f.values[j - 1]:
            raise PreconditionError(
                f"f must be non-increasing: f({j + 1}) = {f.values[j]} > f({j}) = {f.values[j - 1]}"
            )


def corollary_constraints(f, w, n: int) -> LpProblem:
    """Reduced dual for non-increasing f: (n+1)^2 - 1 rows indexed by (j, l)."""
    f, w, n = _prepare(f, w, n)
    _require_positive_f1(f)
    _require_nonincreasing(f)
    lp = LpProblem("min", ["lambda", "mu"], [0.0, 1.0], free={"mu"})
    for j, l, coef in _corollary_rows(f, w, n):
        lp.add([-coef, w(j)], ">=", w(l), f"j={j},l={l}")
    return lp


def solve_corollary(f, w, n: int) -> DualResult:
    lp = corollary_constraints(f, w, n)
    sol = solve_lp(lp)
    if sol.status != "optimal":
        raise InternalError(f"reduced dual program returned {sol.status}")
    return DualResult(sol.variable_values["mu"], sol.variable_values["lambda"])


def lambda_star(f, w, n: int) -> tuple[float, bool]:
    """max_l w(l)/(l f(1)), and whether f(j) >= w(j)/j * min_l l f(1)/w(l) for all j."""
    f, w, n = _prepare(f, w, n)
    _require_positive_f1(f)
    value = max(w(l) / (l * f(1)) for l in range(1, n + 1))
    floor = min(l * f(1) / w(l) for l in range(1, n + 1))
    holds = all(f(j) >= w(j) / j * floor for j in range(1, n + 1))
    return value, holds


def explicit_wstar(f, w, n: int, lam: float | None = None) -> float:
    """W* as the largest of the (j, l) candidate values at lambda = lambda*."""
    f, w, n = _prepare(f, w, n)
    _require_positive_f1(f)
    _require_nonincreasing(f)
    value, holds = lambda_star(f, w, n)
    if not holds:
        raise PreconditionError("lambda* shortcut does not apply: f(j) falls below its lower bound")
    if lam is None:
        lam = value
    best = float("-inf")
    for j, l, coef in _corollary_rows(f, w, n):
        if j == 0:
            continue
        best = max(best, (w(l) + lam * coef) / w(j))
    return best


def poa(f, w, n: int, method: str = "dual_boundary") -> PoaReport:
    """Price of anarchy PoA(f, w, n).

    Returns 0 without solving anything when f(1) <= 0: a single agent choosing
    between a valuable and a worthless resource is indifferent or repelled, so
    the worthless pick is an equilibrium.
    """
    if method not in METHODS:
        raise InvalidArgumentError(f"unknown method {method!r}; choose from {METHODS}")
    f, w, n = _prepare(f, w, n)
    if f(1) <= 0:
        return PoaReport(
            0.0, None, method, n, f, w,
            note="f(1) <= 0: one agent, resources r1 (value > 0) and r2 (value 0); {r2} is an equilibrium",
        )
    if method == "primal":
        pr = solve_primal(f, w, n)
        return PoaReport(1.0 / pr.w_star, pr.w_star, method, n, f, w,
                         lambda_star=pr.lambda_star, mu_star=pr.mu_star, primal_result=pr)
    if method in ("dual_full", "dual_boundary"):
        dr = solve_dual(f, w, n, "full_I" if method == "dual_full" else "boundary_I_R")
    elif method == "corollary":
        dr = solve_corollary(f, w, n)
    else:
        lam, _ = lambda_star(f, w, n)
        dr = DualResult(explicit_wstar(f, w, n, lam), lam)
    return PoaReport(1.0 / dr.mu_star, dr.mu_star, method, n, f, w,
                     lambda_star=dr.lambda_star, mu_star=dr.mu_star, dual_result=dr)


def poa_value(f: Sequence[float] | Mechanism, w, n: int, method: str = "dual_boundary") -> float:
    return poa(f, w, n, method).poa
