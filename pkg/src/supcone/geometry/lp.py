"""Exact two-phase simplex over rationals.

Dense Fraction tableau with Bland's rule in both phases: entering variable is
the lowest-index column with negative reduced cost, leaving row breaks ratio
ties on the lowest basic index. That guarantees termination (no cycling) and
makes every solve deterministic, which the report determinism contract relies
on. The core works on the standard form

    min <cost, z>  s.t.  A z = rhs,  z >= 0;

callers build their own embeddings (free variables as differences, slacks,
distance epigraphs) on top of it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass
class EqLpResult:
    """Outcome of a standard-form solve.

    point/value are set when optimal; ray is an improving recession direction
    (in z-space) when unbounded, anchored at the last basic feasible point.
    """

    status: str
    point: list[Fraction] | None = None
    value: Fraction | None = None
    ray: list[Fraction] | None = None


def _pivot(tab: list[list[Fraction]], basis: list[int], row: int, col: int) -> None:
    piv = tab[row][col]
    tab[row] = [x / piv for x in tab[row]]
    prow = tab[row]
    for i in range(len(tab)):
        if i != row:
            f = tab[i][col]
            if f != 0:
                tab[i] = [a - f * p for a, p in zip(tab[i], prow)]
    basis[row] = col


def _run(tab: list[list[Fraction]], basis: list[int], ncols: int) -> tuple[str, int]:
    """Simplex loop on a tableau whose last row is the reduced-cost row.

    Returns (status, entering column); the column is only meaningful for
    UNBOUNDED, where no leaving row exists.
    """
    m = len(tab) - 1
    rhs = ncols
    while True:
        objrow = tab[m]
        enter = -1
        for j in range(ncols):
            if objrow[j] < 0:
                enter = j
                break
        if enter < 0:
            return OPTIMAL, -1
        leave = -1
        best: Fraction | None = None
        for i in range(m):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][rhs] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave < 0:
            return UNBOUNDED, enter
        _pivot(tab, basis, leave, enter)


def solve_min_eq(
    rows: Sequence[Sequence[Fraction]],
    rhs: Sequence[Fraction],
    cost: Sequence[Fraction],
) -> EqLpResult:
    """min <cost, z> subject to rows . z = rhs, z >= 0."""
    n = len(cost)
    A = [list(r) for r in rows]
    b = list(rhs)
    for r in A:
        if len(r) != n:
            raise ValueError("row length does not match cost length")
    for i in range(len(b)):
        if b[i] < 0:
            A[i] = [-x for x in A[i]]
            b[i] = -b[i]
    m = len(A)

    # Phase 1: artificial basis, minimize the artificial mass.
    ncols = n + m
    tab = [A[i] + [_ONE if k == i else _ZERO for k in range(m)] + [b[i]] for i in range(m)]
    basis = [n + i for i in range(m)]
    obj = []
    for j in range(ncols):
        cj = _ONE if j >= n else _ZERO
        obj.append(cj - sum((tab[i][j] for i in range(m)), _ZERO))
    obj.append(-sum(b, _ZERO))
    tab.append(obj)
    _run(tab, basis, ncols)
    if -tab[m][ncols] != 0:
        return EqLpResult(INFEASIBLE)

    # Drive leftover artificials out of the basis; a row with no real pivot
    # candidate is a redundant constraint and gets dropped.
    drop: list[int] = []
    for i in range(m):
        if basis[i] >= n:
            piv_col = -1
            for j in range(n):
                if tab[i][j] != 0:
                    piv_col = j
                    break
            if piv_col >= 0:
                _pivot(tab, basis, i, piv_col)
            else:
                drop.append(i)
    keep_rows = [i for i in range(m) if i not in drop]

    # Phase 2 tableau: real columns only, fresh reduced costs.
    tab2 = [[tab[i][j] for j in range(n)] + [tab[i][ncols]] for i in keep_rows]
    basis2 = [basis[i] for i in keep_rows]
    m2 = len(tab2)
    obj2 = []
    for j in range(n):
        red = Fraction(cost[j])
        for i in range(m2):
            red -= cost[basis2[i]] * tab2[i][j]
        obj2.append(red)
    val0 = sum((cost[basis2[i]] * tab2[i][n] for i in range(m2)), _ZERO)
    obj2.append(-val0)
    tab2.append(obj2)
    status, enter = _run(tab2, basis2, n)

    z = [_ZERO] * n
    for i in range(m2):
        z[basis2[i]] = tab2[i][n]
    if status == UNBOUNDED:
        ray = [_ZERO] * n
        ray[enter] = _ONE
        for i in range(m2):
            ray[basis2[i]] = -tab2[i][enter]
        return EqLpResult(UNBOUNDED, point=z, ray=ray)
    value = sum((Fraction(cost[j]) * z[j] for j in range(n)), _ZERO)
    return EqLpResult(OPTIMAL, point=z, value=value)


def solve_nonneg_combination(
    columns: Sequence[Sequence[Fraction]],
    target: Sequence[Fraction],
) -> list[Fraction] | None:
    """Find mu >= 0 with sum_i mu_i * columns[i] = target, or None.

    Columns and target live in the same R^d; this is a pure phase-1 solve.
    """
    d = len(target)
    if not columns:
        return [] if all(x == 0 for x in target) else None
    rows = [[Fraction(col[k]) for col in columns] for k in range(d)]
    res = solve_min_eq(rows, [Fraction(x) for x in target], [_ZERO] * len(columns))
    if res.status != OPTIMAL:
        return None
    return res.point
