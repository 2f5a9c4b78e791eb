"""Integer simplicial chains: boundary, mass, restriction, pushforward.

A chain lives on a host complex and stores its simplices in canonical
(sorted) form; the orientation of a stored simplex is its sorted vertex order.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Sequence

import mpmath

from . import exact
from .simplicial import VOLUME_PREC, Chart, SimplicialComplex, orient, signed_chart_volume, volume


class ChainError(ValueError):
    pass


class Chain:
    """Formal sum of oriented k-simplices of ``complex`` with integer coefficients."""

    def __init__(self, complex: SimplicialComplex, dim: int, terms: dict | Iterable = ()):
        self.complex = complex
        self.dim = dim
        items = terms.items() if isinstance(terms, dict) else terms
        acc: dict[tuple, int] = {}
        for s, c in items:
            if int(c) != c:
                raise ChainError("chain coefficients must be integers")
            key, sign = orient(s)
            if len(key) != dim + 1:
                raise ChainError(f"simplex {tuple(s)} is not {dim}-dimensional")
            if key not in complex:
                raise ChainError(f"simplex {tuple(s)} is not in the host complex")
            acc[key] = acc.get(key, 0) + sign * int(c)
        self.terms = {s: c for s, c in sorted(acc.items()) if c}

    @classmethod
    def zero(cls, complex, dim):
        return cls(complex, dim, {})

    @classmethod
    def fundamental(cls, complex: SimplicialComplex, orientation: dict | None = None) -> "Chain":
        """Sum of top simplices with the given signs (default all +1)."""
        n = complex.dim
        orientation = orientation or {}
        return cls(complex, n, {s: orientation.get(s, 1) for s in complex.simplices(n)})

    def __iter__(self):
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return isinstance(other, Chain) and self.dim == other.dim and self.terms == other.terms

    def __repr__(self):
        return f"Chain(dim={self.dim}, terms={self.terms})"

    def _check(self, other):
        if other.dim != self.dim:
            raise ChainError("adding chains of different dimension")
        if other.complex is not self.complex and other.complex != self.complex:
            raise ChainError("chains live on different complexes")

    def __add__(self, other: "Chain") -> "Chain":
        self._check(other)
        t = dict(self.terms)
        for s, c in other.terms.items():
            t[s] = t.get(s, 0) + c
        return Chain(self.complex, self.dim, t)

    def __neg__(self):
        return Chain(self.complex, self.dim, {s: -c for s, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, k: int):
        return Chain(self.complex, self.dim, {s: k * c for s, c in self.terms.items()})

    def coefficient(self, s) -> int:
        key, sign = orient(s)
        return sign * self.terms.get(key, 0)

    def vector(self) -> list[int]:
        return [self.terms.get(s, 0) for s in self.complex.simplices(self.dim)]

    def to_json(self) -> dict:
        return {"dim": self.dim, "terms": [{"simplex": list(s), "coeff": c} for s, c in self.terms.items()]}


def from_vector(K: SimplicialComplex, k: int, vec: Sequence[int]) -> Chain:
    return Chain(K, k, {s: int(c) for s, c in zip(K.simplices(k), vec) if c})


def boundary(c: Chain) -> Chain:
    """Alternating-sum boundary."""
    if c.dim < 1:
        raise ChainError("boundary of a 0-chain is not defined here")
    out: dict[tuple, int] = {}
    for s, coef in c.terms.items():
        for i in range(len(s)):
            f = s[:i] + s[i + 1:]
            out[f] = out.get(f, 0) + (-1) ** i * coef
    return Chain(c.complex, c.dim - 1, out)


def simplex_volume(K: SimplicialComplex, s: tuple) -> mpmath.mpf:
    if K.coords is None:
        raise ChainError("mass needs vertex coordinates")
    return volume(K.vertex_points(s))


def mass(c: Chain) -> mpmath.mpf:
    """Sum of |coefficient| times k-volume, at 128-bit precision."""
    with mpmath.workprec(VOLUME_PREC):
        total = mpmath.mpf(0)
        for s, coef in c.terms.items():
            total += abs(coef) * simplex_volume(c.complex, s)
        return total


def restrict(c: Chain, predicate: Callable[[tuple], bool]) -> Chain:
    """Keep the terms whose simplex satisfies ``predicate``."""
    return Chain(c.complex, c.dim, {s: v for s, v in c.terms.items() if predicate(s)})


def star_predicate(K: SimplicialComplex, vertices: Iterable[int]) -> Callable[[tuple], bool]:
    """Simplices touching any of the given vertices."""
    vs = set(vertices)
    return lambda s: bool(vs & set(s))


class PLMap:
    """Simplexwise-affine map given by the images of the source vertices.

    The affine map on a simplex is determined by its vertex images, so maps
    agree on shared faces by construction.
    """

    def __init__(self, source: SimplicialComplex, images: Sequence[Sequence]):
        if len(images) < source.nverts:
            raise ChainError("every source vertex needs an image")
        self.source = source
        self.images = tuple(exact.point(p) for p in images)

    @classmethod
    def affine(cls, source: SimplicialComplex, A: Sequence[Sequence], t: Sequence | None = None) -> "PLMap":
        t = t or [0] * len(A)
        imgs = []
        for p in source.coords:
            imgs.append(tuple(sum((exact.to_q(a) * x for a, x in zip(row, p)), Fraction(0)) + exact.to_q(ti)
                              for row, ti in zip(A, t)))
        return cls(source, imgs)

    @classmethod
    def identity(cls, source: SimplicialComplex) -> "PLMap":
        return cls(source, source.coords)

    def image_points(self, s: Sequence[int]) -> list:
        return [self.images[v] for v in s]

    def affine_on(self, s: Sequence[int]) -> tuple[list, tuple]:
        """(A, t) with A x + t matching the map on aff(s); A is zero on the
        orthogonal complement of the simplex's direction space."""
        pts = self.source.vertex_points(s)
        img = self.image_points(s)
        v0, w0 = pts[0], img[0]
        E = [exact.sub(p, v0) for p in pts[1:]]
        F = [exact.sub(q, w0) for q in img[1:]]
        n, m = len(v0), len(w0)
        if not E:
            A = [[Fraction(0)] * n for _ in range(m)]
        else:
            k = len(E)
            G = [[exact.dot(e, f) for f in E] for e in E]
            aug = [list(G[i]) + [Fraction(int(i == j)) for j in range(k)] for i in range(k)]
            R, _ = exact.rref(aug, 2 * k)
            Ginv = [row[k:] for row in R[:k]]
            # A = F^T Ginv E
            P = [[sum((Ginv[i][j] * E[j][c] for j in range(k)), Fraction(0)) for c in range(n)] for i in range(k)]
            A = [[sum((F[i][r] * P[i][c] for i in range(k)), Fraction(0)) for c in range(n)] for r in range(m)]
        t = tuple(w0[r] - sum((A[r][c] * v0[c] for c in range(n)), Fraction(0)) for r in range(m))
        return A, t

    def compatible(self) -> bool:
        """Affine pieces agree on every shared face (true by construction;
        checked exactly)."""
        for s in self.source.facets():
            A, t = self.affine_on(s)
            for v in s:
                x = self.source.coords[v]
                y = tuple(sum((A[r][c] * x[c] for c in range(len(x))), Fraction(0)) + t[r]
                          for r in range(len(t)))
                if y != self.images[v]:
                    return False
        return True


def _bbox(pts):
    return [(min(c), max(c)) for c in zip(*pts)]


def pushforward(c: Chain, f: PLMap, target: SimplicialComplex) -> Chain:
    """f_# c on ``target``, which must already triangulate every image simplex.

    Each image is matched with the target k-simplices inside it; their exact
    chart volumes must add up to the image's, and each picks up the sign
    comparing its sorted orientation with the image orientation.
    """
    k = c.dim
    out: dict[tuple, int] = {}
    cand = target.simplices(k)
    boxes = [_bbox(target.vertex_points(t)) for t in cand]
    for s, coef in c.terms.items():
        img = f.image_points(s)
        if exact.rank([exact.sub(q, img[0]) for q in img[1:]]) < k:
            continue
        if k == 0:
            hits = [t for t in cand if target.coords[t[0]] == img[0]]
            if not hits:
                raise ChainError(f"image of simplex {s} is not a vertex of the target")
            out[hits[0]] = out.get(hits[0], 0) + coef
            continue
        chart = Chart.spanning(img)
        ref = signed_chart_volume(img, chart)
        lo = [min(col) for col in zip(*img)]
        hi = [max(col) for col in zip(*img)]
        covered = Fraction(0)
        for t, box in zip(cand, boxes):
            if any(b0 < l or b1 > h for (b0, b1), l, h in zip(box, lo, hi)):
                continue
            tp = target.vertex_points(t)
            if not all(chart.contains(p) for p in tp):
                continue
            if not all(_in_simplex_chart(chart.local(p), [chart.local(q) for q in img]) for p in tp):
                continue
            v = signed_chart_volume(tp, chart)
            if v == 0:
                continue
            sign = 1 if (v > 0) == (ref > 0) else -1
            out[t] = out.get(t, 0) + sign * coef
            covered += abs(v)
        if covered != abs(ref):
            raise ChainError(f"image of simplex {s} is not a union of target simplices")
    return Chain(target, k, out)


def _in_simplex_chart(y, verts) -> bool:
    k = len(verts) - 1
    M = [[verts[j + 1][i] - verts[0][i] for j in range(k)] for i in range(k)]
    lam = exact.solve(M, exact.sub(y, verts[0]))
    return lam is not None and all(v >= 0 for v in lam) and sum(lam) <= 1


def image_complex(f: PLMap) -> SimplicialComplex:
    """Target complex for an injective simplexwise-affine map: the images of
    the source simplices, on the image points."""
    pos = {}
    coords = []
    ids = []
    for p in f.images[: f.source.nverts]:
        if p not in pos:
            pos[p] = len(coords)
            coords.append(p)
        ids.append(pos[p])
    simplices = []
    for s in f.source.facets():
        t = tuple(sorted({ids[v] for v in s}))
        simplices.append(t)
    return SimplicialComplex(simplices, coords=coords)


def chain_from_json(K: SimplicialComplex, data: dict) -> Chain:
    try:
        k = int(data["dim"])
        terms = [(tuple(t["simplex"]), t["coeff"]) for t in data["terms"]]
    except (KeyError, TypeError) as e:
        raise ChainError(f"malformed chain: {e}") from e
    for s, c in terms:
        if c == 0:
            raise ChainError("nonzero coefficients: zero coefficient listed")
    return Chain(K, k, terms)

