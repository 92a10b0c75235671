"""Dense two-phase tableau simplex with Bland's anti-cycling rule.

The programs built in this package are small (two rows by O(n^3) columns, or
a handful of columns by O(n^2) rows) and highly degenerate, so a plain dense
tableau with deterministic pivoting is the right tool.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError, NumericFailure

__all__ = ["Constraint", "LpProblem", "LpSolution", "solve_lp", "TAU_FEAS", "TAU_OPT"]

TAU_FEAS = 1e-9
TAU_OPT = 1e-9
_PIVOT_TOL = 1e-11

_RELATIONS = {"<=", ">=", "="}


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[float, ...]
    relation: str
    rhs: float
    name: str = ""


@dataclass
class LpProblem:
    """``sense`` is ``"max"`` or ``"min"``; ``free`` names the unrestricted variables."""

    sense: str
    variables: list[str]
    objective: list[float]
    constraints: list[Constraint] = field(default_factory=list)
    free: set[str] = field(default_factory=set)

    def __post_init__(self):
        if self.sense not in ("max", "min"):
            raise InvalidArgumentError(f"sense must be 'max' or 'min', got {self.sense!r}")
        if len(set(self.variables)) != len(self.variables):
            raise InvalidArgumentError("variable names must be unique")
        if len(self.objective) != len(self.variables):
            raise InvalidArgumentError(
                f"objective has {len(self.objective)} entries for {len(self.variables)} variables"
            )
        unknown = set(self.free) - set(self.variables)
        if unknown:
            raise InvalidArgumentError(f"free variables not declared: {sorted(unknown)}")
        for con in self.constraints:
            self._check(con)

    def _check(self, con: Constraint):
        if len(con.coeffs) != len(self.variables):
            raise InvalidArgumentError(
                f"constraint {con.name or '?'} has {len(con.coeffs)} coefficients, "
                f"expected {len(self.variables)}"
            )
        if con.relation not in _RELATIONS:
            raise InvalidArgumentError(f"unknown relation {con.relation!r}")

    def add(self, coeffs: Sequence[float], relation: str, rhs: float, name: str = ""):
        con = Constraint(tuple(float(c) for c in coeffs), relation, float(rhs), name)
        self._check(con)
        self.constraints.append(con)
        return con

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.constraints), len(self.variables)


@dataclass
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    objective_value: float = float("nan")
    variable_values: dict[str, float] = field(default_factory=dict)
    # d(objective)/d(rhs) per constraint, in the problem's own sense
    dual_values: dict[int, float] = field(default_factory=dict)
    iterations: int = 0

    @property
    def x(self) -> np.ndarray:
        return np.array(list(self.variable_values.values()))


def _pivot(T: np.ndarray, r: int, c: int) -> None:
    T[r] /= T[r, c]
    col = T[:, c].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])


def _run_simplex(T, basis, allowed, cap, it):
    """Maximize with the last row of T holding -reduced costs. Returns (status, iterations)."""
    m = T.shape[0] - 1
    while True:
        if it >= cap:
            raise NumericFailure(
                "simplex stalled at iteration cap",
                {"iterations": it, "cap": cap, "rows": m, "cols": T.shape[1] - 1},
            )
        reduced = T[-1, :-1]
        entering = np.flatnonzero((reduced < -TAU_OPT) & allowed)
        if entering.size == 0:
            return "optimal", it
        e = int(entering[0])  # Bland: lowest index
        col = T[:m, e]
        pos = np.flatnonzero(col > _PIVOT_TOL)
        if pos.size == 0:
            return "unbounded", it
        ratios = T[pos, -1] / col[pos]
        best = ratios.min()
        ties = pos[ratios <= best + TAU_FEAS * max(1.0, abs(best))]
        r = int(ties[np.argmin(basis[ties])])  # Bland: lowest basic index leaves
        _pivot(T, r, e)
        basis[r] = e
        it += 1


def solve_lp(problem: LpProblem) -> LpSolution:
    """Solve ``problem`` by the two-phase simplex method.

    Free variables are split into differences of non-negative parts. Equality
    and ``>=`` rows get phase-1 artificials. Raises NumericFailure if the pivot
    count exceeds ``10 * (rows + cols)**2`` or the returned point fails the
    feasibility re-check.
    """
    m, nv = problem.shape
    names = problem.variables
    free_idx = [k for k, v in enumerate(names) if v in problem.free]

    A0 = np.array([c.coeffs for c in problem.constraints], dtype=float).reshape(m, nv)
    b0 = np.array([c.rhs for c in problem.constraints], dtype=float)
    c0 = np.asarray(problem.objective, dtype=float)
    sign = 1.0 if problem.sense == "max" else -1.0

    # structural columns: originals, then negative parts of free variables
    A = np.hstack([A0, -A0[:, free_idx]])
    c = sign * np.concatenate([c0, -c0[free_idx]])
    ns = A.shape[1]

    rel = [con.relation for con in problem.constraints]
    b = b0.copy()
    flip = np.where(b < 0, -1.0, 1.0)
    A *= flip[:, None]
    b *= flip
    rel = [
        ({"<=": ">=", ">=": "<="}.get(r, r) if f < 0 else r) for r, f in zip(rel, flip)
    ]

    n_slack = sum(r != "=" for r in rel)
    n_art = sum(r != "<=" for r in rel)
    N = ns + n_slack + n_art
    T = np.zeros((m + 1, N + 1))
    T[:m, :ns] = A
    T[:m, -1] = b
    basis = np.empty(m, dtype=int)
    identity_col = np.empty(m, dtype=int)  # column holding B^-1 e_i from the start
    art_cols = []
    s = ns
    a = ns + n_slack
    for i, r in enumerate(rel):
        if r == "<=":
            T[i, s] = 1.0
            basis[i] = identity_col[i] = s
            s += 1
        else:
            if r == ">=":
                T[i, s] = -1.0
                s += 1
            T[i, a] = 1.0
            basis[i] = identity_col[i] = a
            art_cols.append(a)
            a += 1

    cap = 10 * (m + nv) ** 2 + 10
    it = 0
    allowed = np.ones(N, dtype=bool)

    if art_cols:
        # phase 1: maximize -sum(artificials)
        T[-1, art_cols] = 1.0
        for i in range(m):
            if basis[i] in art_cols:
                T[-1] -= T[i]
        status, it = _run_simplex(T, basis, allowed, cap, it)
        if -T[-1, -1] > TAU_FEAS * max(1.0, np.abs(b).max(initial=0.0)):
            return LpSolution("infeasible", iterations=it)
        art_set = set(art_cols)
        for i in range(m):
            if basis[i] in art_set:
                row = T[i, : ns + n_slack]
                nz = np.flatnonzero(np.abs(row) > _PIVOT_TOL)
                if nz.size:
                    _pivot(T, i, int(nz[0]))
                    basis[i] = int(nz[0])
                # else the row is redundant; its artificial stays basic at zero
        allowed[art_cols] = False

    # phase 2 objective row: -c_j + c_B B^-1 A_j
    cost = np.zeros(N)
    cost[:ns] = c
    T[-1] = 0.0
    T[-1, :N] = -cost
    for i in range(m):
        if cost[basis[i]] != 0.0:
            T[-1] += cost[basis[i]] * T[i]
    status, it = _run_simplex(T, basis, allowed, cap, it)
    if status == "unbounded":
        return LpSolution("unbounded", iterations=it)

    z = np.zeros(N)
    z[basis] = T[:m, -1]
    x = z[:nv].copy()
    if free_idx:
        x[free_idx] -= z[nv:ns]
    x[np.abs(x) < 1e-15] = 0.0
    y = T[-1, identity_col] * flip * sign
    value = float(c0 @ x)

    _check_feasible(A0, b0, problem.constraints, x)
    return LpSolution(
        "optimal",
        value,
        {name: float(v) for name, v in zip(names, x)},
        {i: float(v) for i, v in enumerate(y)},
        it,
    )


def _check_feasible(A0, b0, constraints, x):
    lhs = A0 @ x
    scale = np.maximum(1.0, np.maximum(np.abs(b0), np.abs(A0) @ np.abs(x)))
    for i, con in enumerate(constraints):
        gap = lhs[i] - b0[i]
        viol = {"<=": gap, ">=": -gap, "=": abs(gap)}[con.relation]
        if viol > 1e3 * TAU_FEAS * scale[i]:
            raise NumericFailure(
                "simplex returned an infeasible point",
                {"row": i, "name": con.name, "violation": float(viol)},
            )
