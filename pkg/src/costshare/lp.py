"""Exact linear programming over the rationals.

A small dictionary-form simplex (Chvátal style) using Bland's rule for both
the entering and leaving choice. Everything is ``fractions.Fraction``; there
is no tolerance anywhere. Problems are always maximisation problems.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

LE = "<="
EQ = "="
GE = ">="


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple
    relation: str
    rhs: Fraction

    def lhs(self, x: Sequence) -> Fraction:
        return sum((a * xi for a, xi in zip(self.coeffs, x) if a), Fraction(0))

    def satisfied(self, x: Sequence) -> bool:
        v = self.lhs(x)
        return v <= self.rhs if self.relation == LE else v == self.rhs

    def tight(self, x: Sequence) -> bool:
        return self.lhs(x) == self.rhs


@dataclass
class LinearProgram:
    """max objective . x  subject to the constraints and lower bounds.

    ``lower[j]`` is 0 (the default) or None for a free variable. Rows with
    relation ``>=`` are negated into ``<=`` when added.
    """

    num_vars: int
    objective: list = field(default_factory=list)
    constraints: list = field(default_factory=list)
    lower: list = field(default_factory=list)
    names: list = field(default_factory=list)
    tags: list = field(default_factory=list)

    def __post_init__(self):
        if not self.objective:
            self.objective = [Fraction(0)] * self.num_vars
        self.objective = [Fraction(c) for c in self.objective]
        if len(self.objective) != self.num_vars:
            raise ValueError("objective length differs from variable count")
        if not self.lower:
            self.lower = [0] * self.num_vars
        if not self.names:
            self.names = [f"x{j}" for j in range(self.num_vars)]
        rows, self.constraints, self.tags = self.constraints, [], []
        for c in rows:
            if isinstance(c, Constraint):
                self.add(c.coeffs, c.relation, c.rhs)
            else:
                self.add(*c)

    def _dense(self, coeffs) -> tuple:
        if isinstance(coeffs, Mapping):
            row = [Fraction(0)] * self.num_vars
            for j, a in coeffs.items():
                row[j] = Fraction(a)
            return tuple(row)
        row = tuple(Fraction(a) for a in coeffs)
        if len(row) != self.num_vars:
            raise ValueError("constraint row length differs from variable count")
        return row

    def add(self, coeffs, relation: str, rhs, tag=None) -> None:
        """Append a row; ``tag`` is an optional caller label kept in ``tags``."""
        row = self._dense(coeffs)
        rhs = Fraction(rhs)
        if relation == GE:
            row, rhs, relation = tuple(-a for a in row), -rhs, LE
        if relation not in (LE, EQ):
            raise ValueError(f"unknown relation {relation!r}")
        self.constraints.append(Constraint(row, relation, rhs))
        self.tags.append(tag)

    def with_objective(self, objective) -> "LinearProgram":
        lp = LinearProgram(self.num_vars, list(objective), [], list(self.lower), list(self.names))
        lp.constraints = list(self.constraints)
        lp.tags = list(self.tags)
        return lp

    def dump(self) -> str:
        """Plain-text normalised form, one constraint per line."""

        def term_list(coeffs):
            parts = [f"{a} {self.names[j]}" for j, a in enumerate(coeffs) if a]
            return " + ".join(parts) if parts else "0"

        lines = [f"max {term_list(self.objective)}"]
        for c in self.constraints:
            lines.append(f"  {term_list(c.coeffs)} {c.relation} {c.rhs}")
        free = [self.names[j] for j, lb in enumerate(self.lower) if lb is None]
        if free:
            lines.append("  free: " + ", ".join(free))
        return "\n".join(lines)


@dataclass
class LpSolution:
    status: str
    values: tuple = ()
    objective: Fraction | None = None
    tight: frozenset = frozenset()
    primary_objective: Fraction | None = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def solve(lp: LinearProgram) -> LpSolution:
    """Exact optimum of ``lp`` (or its infeasible/unbounded status)."""
    n = lp.num_vars
    # column map: original variable j -> list of (internal column, sign)
    cols: list = []
    ncols = 0
    for j in range(n):
        if lp.lower[j] is None:
            cols.append(((ncols, 1), (ncols + 1, -1)))
            ncols += 2
        else:
            cols.append(((ncols, 1),))
            ncols += 1

    def internal(coeffs) -> dict:
        out = {}
        for j, a in enumerate(coeffs):
            if a:
                for col, sgn in cols[j]:
                    out[col] = a * sgn
        return out

    # presolve: identical <= rows keep only the smallest rhs
    best: dict = {}
    order: list = []
    for c in lp.constraints:
        rows = [(c.coeffs, c.rhs)]
        if c.relation == EQ:
            rows.append((tuple(-a for a in c.coeffs), -c.rhs))
        for coeffs, rhs in rows:
            if coeffs in best:
                best[coeffs] = min(best[coeffs], rhs)
            else:
                best[coeffs] = rhs
                order.append(coeffs)
    rows_a = []
    rows_b = []
    for coeffs in order:
        rhs = best[coeffs]
        if not any(coeffs):
            if rhs < 0:
                return LpSolution(INFEASIBLE)
            continue
        rows_a.append(internal(coeffs))
        rows_b.append(rhs)

    obj = internal(lp.objective)
    status, x = _dictionary_simplex(ncols, rows_a, rows_b, obj)
    if status != OPTIMAL:
        return LpSolution(status)
    values = []
    for j in range(n):
        values.append(sum((x[col] * sgn for col, sgn in cols[j]), Fraction(0)))
    values = tuple(values)
    objective = sum((a * v for a, v in zip(lp.objective, values)), Fraction(0))
    tight = frozenset(i for i, c in enumerate(lp.constraints) if c.tight(values))
    return LpSolution(OPTIMAL, values, objective, tight)


def solve_lexicographic(lp: LinearProgram, secondary) -> LpSolution:
    """Among optimal solutions of ``lp``, maximise ``secondary``.

    The returned ``objective`` is the secondary value; ``primary_objective``
    holds the optimum of the original objective.
    """
    first = solve(lp)
    if not first.optimal:
        return first
    lp2 = lp.with_objective(secondary)
    lp2.add(lp.objective, EQ, first.objective)
    second = solve(lp2)
    if not second.optimal:
        return second
    tight = frozenset(i for i, c in enumerate(lp.constraints) if c.tight(second.values))
    return LpSolution(OPTIMAL, second.values, second.objective, tight, first.objective)


def is_feasible_point(lp: LinearProgram, x: Sequence) -> bool:
    if len(x) != lp.num_vars:
        return False
    for j, lb in enumerate(lp.lower):
        if lb is not None and x[j] < lb:
            return False
    return all(c.satisfied(x) for c in lp.constraints)


def max_step(lp: LinearProgram, x: Sequence, direction: Sequence):
    """Largest eps >= 0 with x + eps*direction feasible, or None if unbounded.

    This is the one-variable LP in eps, solved by the exact ratio test.
    ``x`` itself must be feasible.
    """
    if not is_feasible_point(lp, x):
        raise ValueError("starting point is infeasible")
    best = None
    for j, lb in enumerate(lp.lower):
        if lb is not None and direction[j] < 0:
            r = (x[j] - lb) / -Fraction(direction[j])
            best = r if best is None else min(best, r)
    for c in lp.constraints:
        slope = sum((a * d for a, d in zip(c.coeffs, direction) if a and d), Fraction(0))
        if c.relation == EQ:
            if slope != 0:
                return Fraction(0)
            continue
        if slope > 0:
            r = (c.rhs - c.lhs(x)) / slope
            best = r if best is None else min(best, r)
    return best


# --------------------------------------------------------------------------
# dictionary simplex
#
# Each row says   x_basic = b + sum_j d_j * x_j   over the nonbasic columns j.
# The objective is   z = z0 + sum_j c_j * x_j.
# Columns 0..n-1 are structural, n..n+m-1 are slacks, n+m is the auxiliary
# variable used in phase one.


def _pivot(rows, consts, basis, obj, r: int, e: int) -> Fraction:
    row = rows[r]
    a = row.pop(e)
    leaving = basis[r]
    inv = 1 / a
    new = {j: -d * inv for j, d in row.items()}
    new[leaving] = inv
    const = -consts[r] * inv
    rows[r] = new
    consts[r] = const
    basis[r] = e
    for k, other in enumerate(rows):
        if k == r:
            continue
        d = other.pop(e, None)
        if d is None:
            continue
        consts[k] += d * const
        for j, v in new.items():
            s = other.get(j, 0) + d * v
            if s:
                other[j] = s
            else:
                other.pop(j, None)
    d = obj.pop(e, None)
    if d is None:
        return Fraction(0)
    for j, v in new.items():
        s = obj.get(j, 0) + d * v
        if s:
            obj[j] = s
        else:
            obj.pop(j, None)
    return d * const


def _bland_loop(rows, consts, basis, obj, z0: Fraction):
    while True:
        entering = min((j for j, c in obj.items() if c > 0), default=None)
        if entering is None:
            return OPTIMAL, z0
        best = None
        for k, row in enumerate(rows):
            d = row.get(entering)
            if d is not None and d < 0:
                ratio = consts[k] / -d
                key = (ratio, basis[k])
                if best is None or key < best[0]:
                    best = (key, k)
        if best is None:
            return UNBOUNDED, z0
        z0 += _pivot(rows, consts, basis, obj, best[1], entering)


def _dictionary_simplex(n: int, rows_a: list, rows_b: list, obj: dict):
    m = len(rows_a)
    rows = [{j: -a for j, a in row.items()} for row in rows_a]
    consts = list(rows_b)
    basis = [n + i for i in range(m)]
    aux = n + m

    if any(b < 0 for b in consts):
        for row in rows:
            row[aux] = Fraction(1)
        phase1 = {aux: Fraction(-1)}
        worst = min(range(m), key=lambda k: (consts[k], basis[k]))
        z = _pivot(rows, consts, basis, phase1, worst, aux)
        status, z = _bland_loop(rows, consts, basis, phase1, z)
        if z < 0:
            return INFEASIBLE, None
        if aux in basis:
            r = basis.index(aux)
            if rows[r]:
                _pivot(rows, consts, basis, {}, r, min(rows[r]))
            else:
                del rows[r], consts[r], basis[r]
        for row in rows:
            row.pop(aux, None)

    # express the real objective over the current nonbasic columns
    z0 = Fraction(0)
    cur: dict = {}
    pos = {b: k for k, b in enumerate(basis)}
    for j, c in obj.items():
        if j in pos:
            k = pos[j]
            z0 += c * consts[k]
            for jj, d in rows[k].items():
                s = cur.get(jj, 0) + c * d
                if s:
                    cur[jj] = s
                else:
                    cur.pop(jj, None)
        else:
            s = cur.get(j, 0) + c
            if s:
                cur[j] = s
            else:
                cur.pop(j, None)
    status, z0 = _bland_loop(rows, consts, basis, cur, z0)
    if status != OPTIMAL:
        return status, None
    x = [Fraction(0)] * n
    for k, b in enumerate(basis):
        if b < n:
            x[b] = consts[k]
    return OPTIMAL, x


# -- reference solver -------------------------------------------------------------


def _solve_square(a: list, b: list):
    """Unique solution of a square system by Gauss-Jordan elimination, or None."""
    n = len(a)
    m = [list(row) + [rhs] for row, rhs in zip(a, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [v / p for v in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[r][n] for r in range(n)]


def vertex_enumeration(lp: LinearProgram):
    """Optimum of a bounded, nonnegative-variable LP by trying every basis.

    Exponential; only meant as an independent check on tiny programs.
    Returns None when no vertex is feasible.
    """
    from itertools import combinations

    n = lp.num_vars
    if any(lb is None for lb in lp.lower):
        raise ValueError("vertex enumeration needs nonnegative variables")
    rows = [(list(c.coeffs), c.rhs) for c in lp.constraints]
    rows += [([Fraction(int(k == j)) for k in range(n)], Fraction(0)) for j in range(n)]
    eq = [k for k, c in enumerate(lp.constraints) if c.relation == EQ]
    others = [k for k in range(len(rows)) if k not in eq]
    best = None
    if len(eq) > n:
        return None
    for pick in combinations(others, n - len(eq)):
        chosen = eq + list(pick)
        x = _solve_square([rows[k][0] for k in chosen], [rows[k][1] for k in chosen])
        if x is None or not is_feasible_point(lp, x):
            continue
        val = sum((c * v for c, v in zip(lp.objective, x)), Fraction(0))
        if best is None or val > best:
            best = val
    return best
