"""Exact linear algebra over the rationals.

Everything here works on dense rows of ``Fraction`` entries.  The systems
coming from slope assignments and cone feasibility are tiny (at most a few
dozen variables), so plain Gaussian elimination and Fourier-Motzkin
elimination are entirely adequate and keep all answers exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

Row = list[Fraction]


def _as_fraction_row(row: Sequence) -> Row:
    return [Fraction(x) for x in row]


def row_reduce(matrix: list[Row]) -> tuple[list[Row], list[int]]:
    """Return (reduced rows, pivot column indices) of ``matrix`` (RREF)."""
    rows = [list(r) for r in matrix]
    pivots: list[int] = []
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, len(rows)):
            if rows[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def matrix_rank(matrix: Iterable[Sequence]) -> int:
    rows = [_as_fraction_row(r) for r in matrix]
    if not rows:
        return 0
    reduced, pivots = row_reduce(rows)
    return len(pivots)


def solve_unique(matrix: Iterable[Sequence], rhs: Sequence) -> Optional[Row]:
    """Solve A x = b.  Returns the solution iff it exists and is unique.

    Returns None when the system is inconsistent or underdetermined.
    """
    a_rows = [_as_fraction_row(r) for r in matrix]
    b = _as_fraction_row(rhs)
    if not a_rows:
        return [] if not b or all(x == 0 for x in b) else None
    n = len(a_rows[0])
    aug = [row + [bv] for row, bv in zip(a_rows, b)]
    reduced, pivots = row_reduce(aug)
    for row in reduced:
        if all(x == 0 for x in row[:-1]) and row[-1] != 0:
            return None
    if n in pivots:
        return None  # pivot in the rhs column: inconsistent
    if len(pivots) < n:
        return None  # free variables remain
    x: Row = [Fraction(0)] * n
    for row, c in zip(reduced, pivots):
        x[c] = row[-1]
    return x


@dataclass(frozen=True)
class LinearConstraint:
    """``coeffs . x + const  (op)  0`` with op one of '=', '>=', '>'."""

    coeffs: tuple[Fraction, ...]
    const: Fraction
    op: str

    def evaluate(self, x: Sequence[Fraction]) -> Fraction:
        return sum(c * v for c, v in zip(self.coeffs, x)) + self.const

    def holds(self, x: Sequence[Fraction]) -> bool:
        val = self.evaluate(x)
        if self.op == "=":
            return val == 0
        if self.op == ">=":
            return val >= 0
        return val > 0


def eq(coeffs: Sequence, const) -> LinearConstraint:
    return LinearConstraint(tuple(Fraction(c) for c in coeffs), Fraction(const), "=")


def ge(coeffs: Sequence, const) -> LinearConstraint:
    return LinearConstraint(tuple(Fraction(c) for c in coeffs), Fraction(const), ">=")


def gt(coeffs: Sequence, const) -> LinearConstraint:
    return LinearConstraint(tuple(Fraction(c) for c in coeffs), Fraction(const), ">")


def _substitute(con: LinearConstraint, var: int, expr_coeffs: Row, expr_const: Fraction) -> LinearConstraint:
    """Replace x_var by expr in ``con`` (expr given over all variables)."""
    f = con.coeffs[var]
    if f == 0:
        return con
    coeffs = list(con.coeffs)
    coeffs[var] = Fraction(0)
    coeffs = [c + f * e for c, e in zip(coeffs, expr_coeffs)]
    return LinearConstraint(tuple(coeffs), con.const + f * expr_const, con.op)


def feasible_point(nvars: int, constraints: Sequence[LinearConstraint]) -> Optional[Row]:
    """Exact feasibility of a system of =, >=, > constraints.

    Returns a rational point satisfying every constraint, or None.  Equalities
    are eliminated by substitution first, the remaining inequalities by
    Fourier-Motzkin; a point is then recovered by back-substitution, picking
    interval midpoints so that strict constraints stay strict.
    """
    equalities = [c for c in constraints if c.op == "="]
    inequalities = [c for c in constraints if c.op != "="]

    # Eliminate pivot variables of the equality system.
    subs: list[tuple[int, Row, Fraction]] = []  # (var, expr over remaining vars, const)
    eqs = list(equalities)
    while eqs:
        con = eqs.pop()
        pivot = next((i for i, c in enumerate(con.coeffs) if c != 0), None)
        if pivot is None:
            if con.const != 0:
                return None
            continue
        pv = con.coeffs[pivot]
        expr = [-c / pv for c in con.coeffs]
        expr[pivot] = Fraction(0)
        econst = -con.const / pv
        eqs = [_substitute(c, pivot, expr, econst) for c in eqs]
        inequalities = [_substitute(c, pivot, expr, econst) for c in inequalities]
        subs = [(v, [ec + e[pivot] * xc for ec, xc in zip(e, expr)], k + e[pivot] * econst)
                for (v, e, k) in subs]
        subs.append((pivot, expr, econst))

    solved_vars = {v for v, _, _ in subs}
    free_vars = [v for v in range(nvars) if v not in solved_vars]

    # Fourier-Motzkin on the free variables.
    rows = [(list(c.coeffs), c.const, c.op == ">") for c in inequalities]
    elim_stack: list[tuple[int, list[tuple[Row, Fraction, bool]]]] = []
    for var in free_vars:
        with_var = [r for r in rows if r[0][var] != 0]
        elim_stack.append((var, [(list(c), k, s) for c, k, s in with_var]))
        without = [r for r in rows if r[0][var] == 0]
        pos = [r for r in with_var if r[0][var] > 0]
        neg = [r for r in with_var if r[0][var] < 0]
        new_rows = list(without)
        for pc, pk, ps in pos:
            for nc, nk, ns in neg:
                a, b = pc[var], -nc[var]
                coeffs = [b * x + a * y for x, y in zip(pc, nc)]
                coeffs[var] = Fraction(0)
                new_rows.append((coeffs, b * pk + a * nk, ps or ns))
        rows = new_rows
    for coeffs, const, strict in rows:
        if any(c != 0 for c in coeffs):  # pragma: no cover - all vars eliminated
            raise AssertionError("elimination left a variable behind")
        if strict and const <= 0:
            return None
        if not strict and const < 0:
            return None

    # Back-substitute the free variables in reverse elimination order.
    x: Row = [Fraction(0)] * nvars
    for var, cons in reversed(elim_stack):
        lo: Optional[Fraction] = None
        hi: Optional[Fraction] = None
        lo_strict = hi_strict = False
        for coeffs, const, strict in cons:
            rest = sum(c * x[i] for i, c in enumerate(coeffs) if i != var) + const
            bound = -rest / coeffs[var]
            if coeffs[var] > 0:
                if lo is None or bound > lo or (bound == lo and strict):
                    lo, lo_strict = bound, strict
            else:
                if hi is None or bound < hi or (bound == hi and strict):
                    hi, hi_strict = bound, strict
        if lo is None and hi is None:
            x[var] = Fraction(0)
        elif lo is None:
            x[var] = hi - 1 if hi_strict else hi
        elif hi is None:
            x[var] = lo + 1 if lo_strict else lo
        else:
            if lo > hi or (lo == hi and (lo_strict or hi_strict)):
                return None  # pragma: no cover - FM should have caught this
            x[var] = (lo + hi) / 2 if (lo_strict or hi_strict) else lo

    # And finally the equality-pivot variables.
    for var, expr, const in reversed(subs):
        x[var] = sum(c * x[i] for i, c in enumerate(expr)) + const

    for con in constraints:
        if not con.holds(x):  # pragma: no cover - sanity net
            raise AssertionError("feasible_point produced an infeasible point")
    return x


def solution_dimension(nvars: int, constraints: Sequence[LinearConstraint]) -> Optional[int]:
    """Dimension of the solution set, assuming all inequalities are strict.

    With only strict inequalities a feasible point is relatively interior, so
    the dimension equals nvars minus the rank of the equality part.  Returns
    None when infeasible.
    """
    if any(c.op == ">=" for c in constraints):
        raise ValueError("solution_dimension expects strict inequalities only")
    if feasible_point(nvars, constraints) is None:
        return None
    eq_rows = [list(c.coeffs) for c in constraints if c.op == "="]
    return nvars - matrix_rank(eq_rows)
