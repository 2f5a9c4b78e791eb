"""Exact rational simplex method.

Solves ``min c.x  s.t.  A x = b, x >= 0`` over :class:`Fraction` with a
two-phase tableau and Bland's rule, so the result is exact and the path is
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LPResult:
    status: str
    x: tuple | None = None
    value: Fraction | None = None
    basis: tuple | None = None


def _pivot(T, basis, r, c):
    pr = T[r]
    pv = pr[c]
    if pv != 1:
        pr = [v / pv for v in pr]
        T[r] = pr
    nz = [j for j, v in enumerate(pr) if v != 0]
    for i, row in enumerate(T):
        if i == r:
            continue
        f = row[c]
        if f != 0:
            for j in nz:
                row[j] -= f * pr[j]
    basis[r] = c


def _run(T, basis, ncols, allowed):
    """Iterate on tableau T whose last row is the reduced-cost row."""
    m = len(T) - 1
    obj = T[-1]
    while True:
        enter = None
        for j in range(ncols):
            if j in allowed and obj[j] < 0:
                enter = j
                break
        if enter is None:
            return OPTIMAL
        best = None
        leave = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave is None:
            return UNBOUNDED
        _pivot(T, basis, leave, enter)
        obj = T[-1]


def linprog_exact(c: Sequence, A: Sequence[Sequence], b: Sequence) -> LPResult:
    """Minimize ``c.x`` subject to ``A x = b``, ``x >= 0`` exactly."""
    n = len(c)
    m = len(A)
    c = [Fraction(v) for v in c]
    rows = []
    for r, bi in zip(A, b):
        r = [Fraction(v) for v in r]
        bi = Fraction(bi)
        if bi < 0:
            r = [-v for v in r]
            bi = -bi
        rows.append((r, bi))
    if m == 0:
        if any(v < 0 for v in c):
            return LPResult(UNBOUNDED)
        return LPResult(OPTIMAL, tuple(Fraction(0) for _ in range(n)), Fraction(0), ())

    # phase 1: artificial columns n..n+m-1
    width = n + m
    T = []
    for i, (r, bi) in enumerate(rows):
        T.append(r + [Fraction(int(i == k)) for k in range(m)] + [bi])
    basis = list(range(n, n + m))
    obj = [Fraction(0)] * (width + 1)
    for i in range(m):
        for j in range(n):
            obj[j] -= T[i][j]
        obj[-1] -= T[i][-1]
    T.append(obj)
    _run(T, basis, width, set(range(width)))
    if T[-1][-1] != 0:
        return LPResult(INFEASIBLE)

    # drive artificials out of the basis; drop redundant rows
    i = 0
    while i < len(T) - 1:
        if basis[i] >= n:
            col = next((j for j in range(n) if T[i][j] != 0), None)
            if col is None:
                del T[i]
                del basis[i]
                continue
            _pivot(T, basis, i, col)
        i += 1
    T = [row[:n] + [row[-1]] for row in T[:-1]]

    # phase 2
    obj = c[:] + [Fraction(0)]
    for i, bi in enumerate(basis):
        cb = c[bi]
        if cb != 0:
            row = T[i]
            for j in range(n + 1):
                obj[j] -= cb * row[j]
    T.append(obj)
    status = _run(T, basis, n, set(range(n)))
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)
    x = [Fraction(0)] * n
    for i, bi in enumerate(basis):
        x[bi] = T[i][-1]
    value = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    return LPResult(OPTIMAL, tuple(x), value, tuple(basis))


def feasible(A: Sequence[Sequence], b: Sequence) -> tuple | None:
    """A nonnegative solution of ``A x = b`` or None."""
    res = linprog_exact([0] * (len(A[0]) if A else 0), A, b)
    return res.x if res.status == OPTIMAL else None
