"""Exact rational arithmetic helpers.

Small dense linear algebra over :class:`fractions.Fraction`.  Everything here
is exact; matrices are lists of rows.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Q = Fraction
Point = tuple  # tuple of Fractions


def to_q(x) -> Fraction:
    """Parse an int, Fraction, or "p/q" / decimal string into a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floating point coordinates are not accepted; use 'p/q' strings")
    raise TypeError(f"cannot convert {x!r} to a rational")


def q_str(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def point(coords: Iterable) -> Point:
    return tuple(to_q(c) for c in coords)


def sub(a: Sequence, b: Sequence) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def add(a: Sequence, b: Sequence) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def scale(c, a: Sequence) -> tuple:
    return tuple(c * x for x in a)


def dot(a: Sequence, b: Sequence):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def centroid(points: Sequence[Sequence]) -> Point:
    n = len(points)
    return tuple(sum(col, Fraction(0)) / n for col in zip(*points))


def rref(rows: Sequence[Sequence], ncols: int | None = None):
    """Reduced row echelon form. Returns (matrix, pivot columns)."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0]) if ncols is None else ncols
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        pv = m[r][c]
        if pv != 1:
            m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[tuple]:
    """Basis of {x : A x = 0}, returned as integer-scaled rational vectors."""
    if not rows:
        return [tuple(Fraction(int(i == j)) for i in range(ncols)) for j in range(ncols)]
    m, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][f]
        basis.append(primitive(v))
    return basis


def primitive(v: Sequence) -> tuple:
    """Scale a rational vector to a primitive integer vector (same direction)."""
    from math import gcd

    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(Fraction(0) for _ in v)
    return tuple(Fraction(x // g) for x in ints)


def det(rows: Sequence[Sequence]) -> Fraction:
    m = [[Fraction(x) for x in r] for r in rows]
    n = len(m)
    d = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            d = -d
        pv = m[c][c]
        d *= pv
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / pv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return d


def solve(rows: Sequence[Sequence], rhs: Sequence):
    """Solve A x = b. Returns one solution (free variables zero) or None."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    m, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for i, pc in enumerate(pivots):
        x[pc] = m[i][ncols]
    return tuple(x)


def transpose(rows: Sequence[Sequence]) -> list[list]:
    return [list(c) for c in zip(*rows)]


def gram_schmidt(vectors: Sequence[Sequence]) -> list[tuple]:
    """Rational Gram-Schmidt without normalization; drops dependent vectors."""
    out: list[tuple] = []
    for v in vectors:
        w = tuple(Fraction(x) for x in v)
        for u in out:
            w = sub(w, scale(dot(w, u) / dot(u, u), u))
        if any(x != 0 for x in w):
            out.append(w)
    return out


def independent_subset(vectors: Sequence[Sequence]) -> list[int]:
    """Indices of a maximal linearly independent subset, greedy in order."""
    chosen: list[int] = []
    basis: list[tuple] = []
    for i, v in enumerate(vectors):
        cand = gram_schmidt(basis + [v])
        if len(cand) > len(basis):
            basis = cand
            chosen.append(i)
    return chosen
