"""Simplicial complexes with exact rational vertex coordinates.

A simplex is stored canonically as a sorted tuple of vertex ids; orientation
travels separately as a sign (see :func:`orient`).  Complexes are immutable
after construction and always closed under taking faces.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import mpmath

from . import exact
from .exact import Point

VOLUME_PREC = 128


class ComplexError(ValueError):
    pass


class InvariantViolation(RuntimeError):
    """A structural fact the construction guarantees turned out false."""


def orient(vertices: Sequence[int]) -> tuple[tuple[int, ...], int]:
    """Return (sorted vertex tuple, sign of the sorting permutation)."""
    vs = list(vertices)
    if len(set(vs)) != len(vs):
        raise ComplexError(f"repeated vertex in simplex {tuple(vs)}")
    sign = 1
    # insertion sort counting transpositions
    for i in range(1, len(vs)):
        j = i
        while j > 0 and vs[j - 1] > vs[j]:
            vs[j - 1], vs[j] = vs[j], vs[j - 1]
            sign = -sign
            j -= 1
    return tuple(vs), sign


def faces_of(s: tuple, k: int | None = None) -> Iterable[tuple]:
    """All nonempty faces of ``s`` (or only those of dimension ``k``)."""
    if k is not None:
        yield from itertools.combinations(s, k + 1)
        return
    for r in range(1, len(s) + 1):
        yield from itertools.combinations(s, r)


def missing_faces(simplices: Iterable[Sequence[int]]) -> list[tuple]:
    have = {tuple(sorted(s)) for s in simplices}
    missing = set()
    for s in have:
        for f in faces_of(s):
            if f not in have:
                missing.add(f)
    return sorted(missing, key=lambda t: (len(t), t))


class SimplicialComplex:
    """Finite simplicial complex, optionally with rational vertex coordinates.

    ``simplices`` may be any generating family; pass ``close=False`` to demand
    that it already be face-closed (an error is raised otherwise).
    """

    def __init__(self, simplices: Iterable[Sequence[int]], coords: Sequence[Sequence] | None = None,
                 close: bool = True, labels: Sequence | None = None):
        gens = {orient(s)[0] for s in simplices}
        if close:
            full = set()
            for s in gens:
                full.update(faces_of(s))
        else:
            miss = missing_faces(gens)
            if miss:
                raise ComplexError(f"face closure violated: missing {miss[0]}")
            full = gens
        verts = sorted({v for s in full for v in s})
        if coords is not None:
            coords = tuple(exact.point(c) for c in coords)
            if verts and verts[-1] >= len(coords):
                raise ComplexError("simplex refers to a vertex without coordinates")
            dims = {len(c) for c in coords}
            if len(dims) > 1:
                raise ComplexError("inconsistent ambient dimension among vertices")
        self.coords: tuple[Point, ...] | None = coords
        self.labels = tuple(labels) if labels is not None else None
        by_dim: dict[int, list] = {}
        for s in full:
            by_dim.setdefault(len(s) - 1, []).append(s)
        self._by_dim = {k: tuple(sorted(v)) for k, v in sorted(by_dim.items())}
        self._set = frozenset(full)
        self.nverts = (verts[-1] + 1) if verts else 0
        if coords is not None:
            self.nverts = max(self.nverts, len(coords))

    @classmethod
    def from_facets(cls, facets, coords=None, labels=None):
        return cls(facets, coords=coords, close=True, labels=labels)

    # --- basic structure -------------------------------------------------
    @property
    def dim(self) -> int:
        return max(self._by_dim) if self._by_dim else -1

    @property
    def ambient_dim(self) -> int | None:
        return len(self.coords[0]) if self.coords else None

    def simplices(self, k: int) -> tuple:
        return self._by_dim.get(k, ())

    def all_simplices(self) -> list[tuple]:
        return [s for k in sorted(self._by_dim) for s in self._by_dim[k]]

    def count(self, k: int) -> int:
        return len(self._by_dim.get(k, ()))

    def f_vector(self) -> list[int]:
        return [self.count(k) for k in range(self.dim + 1)]

    def __contains__(self, s) -> bool:
        return tuple(sorted(s)) in self._set

    def __len__(self) -> int:
        return len(self._set)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return self._set == other._set and self.coords == other.coords

    def __hash__(self):
        return hash(self._set)

    def __repr__(self) -> str:
        return f"SimplicialComplex(f={self.f_vector()})"

    @cached_property
    def _index(self) -> dict:
        return {s: i for k in self._by_dim for i, s in enumerate(self._by_dim[k])}

    def index(self, s: Sequence[int]) -> int:
        """Position of ``s`` within ``simplices(dim s)``."""
        return self._index[tuple(sorted(s))]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.f_vector()))

    def skeleton(self, j: int) -> "SimplicialComplex":
        return SimplicialComplex([s for s in self._set if len(s) - 1 <= j], self.coords, close=False,
                                 labels=self.labels)

    def facets(self) -> list[tuple]:
        """Maximal simplices."""
        cof = set()
        for k in self._by_dim:
            if k == 0:
                continue
            for s in self._by_dim[k]:
                cof.update(itertools.combinations(s, k))
        return sorted((s for s in self._set if s not in cof), key=lambda t: (len(t), t))

    def is_pure(self) -> bool:
        return all(len(s) == self.dim + 1 for s in self.facets())

    @cached_property
    def cofaces(self) -> dict:
        """Map each simplex to the simplices having it as a facet."""
        out: dict[tuple, list] = {s: [] for s in self._set}
        for s in self._set:
            if len(s) > 1:
                for f in itertools.combinations(s, len(s) - 1):
                    out[f].append(s)
        return out

    def star(self, s: Sequence[int]) -> list[tuple]:
        s = set(s)
        return sorted((t for t in self._set if s <= set(t)), key=lambda t: (len(t), t))

    def link(self, v: int) -> "SimplicialComplex":
        lk = [tuple(x for x in t if x != v) for t in self._set if v in t and len(t) > 1]
        return SimplicialComplex(lk)

    def is_connected(self) -> bool:
        verts = [s[0] for s in self.simplices(0)]
        if not verts:
            return True
        adj: dict[int, set] = {v: set() for v in verts}
        for a, b in self.simplices(1):
            adj[a].add(b)
            adj[b].add(a)
        seen = {verts[0]}
        stack = [verts[0]]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(verts)

    def manifold_defects(self) -> list[str]:
        """Reasons this complex fails to be a closed combinatorial manifold."""
        n = self.dim
        out = []
        if not self.is_pure():
            out.append("not pure")
        for f in self.simplices(n - 1):
            c = len(self.cofaces[f])
            if c != 2:
                out.append(f"(n-1)-simplex {f} has {c} cofaces")
        if n >= 2:
            for (v,) in self.simplices(0):
                if not self.link(v).is_connected():
                    out.append(f"link of vertex {v} is disconnected")
        return out

    def is_manifold(self) -> bool:
        return not self.manifold_defects()

    def vertex_points(self, s: Sequence[int]) -> list[Point]:
        if self.coords is None:
            raise ComplexError("complex has no vertex coordinates")
        return [self.coords[v] for v in s]

    def relabel(self, mapping: dict, coords=None, labels=None) -> "SimplicialComplex":
        return SimplicialComplex([[mapping[v] for v in s] for s in self._set], coords=coords, labels=labels)


# --- volumes -------------------------------------------------------------

def gram_determinant(points: Sequence[Point]) -> Fraction:
    p0 = points[0]
    edges = [exact.sub(p, p0) for p in points[1:]]
    if not edges:
        return Fraction(1)
    g = [[exact.dot(a, b) for b in edges] for a in edges]
    return exact.det(g)


def volume(points: Sequence[Sequence]) -> mpmath.mpf:
    """k-dimensional volume of the simplex spanned by ``points``.

    Exact Gram determinant, square root at 128-bit precision.  A 0-simplex has
    volume 1 (counting measure); degenerate simplices have volume 0.
    """
    pts = [exact.point(p) for p in points]
    k = len(pts) - 1
    g = gram_determinant(pts)
    with mpmath.workprec(VOLUME_PREC):
        if g <= 0:
            return mpmath.mpf(0)
        return mpmath.sqrt(mpmath.mpf(g.numerator) / g.denominator) / math.factorial(k)


def squared_volume(points: Sequence[Sequence]) -> Fraction:
    pts = [exact.point(p) for p in points]
    k = len(pts) - 1
    return gram_determinant(pts) / (math.factorial(k) ** 2)


class Chart:
    """Rational affine chart ``x = origin + sum_i c_i basis_i`` of a k-plane."""

    def __init__(self, origin: Sequence, basis: Sequence[Sequence]):
        self.origin = exact.point(origin)
        self.basis = [exact.point(b) for b in basis]
        if exact.rank(self.basis) != len(self.basis):
            raise ComplexError("chart basis is not linearly independent")
        self._cols = exact.transpose(self.basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @classmethod
    def identity(cls, n: int) -> "Chart":
        return cls([0] * n, [[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def spanning(cls, points: Sequence[Sequence]) -> "Chart":
        """Chart of the affine hull of ``points`` using their own edge vectors."""
        pts = [exact.point(p) for p in points]
        edges = [exact.sub(p, pts[0]) for p in pts[1:]]
        idx = exact.independent_subset(edges)
        return cls(pts[0], [edges[i] for i in idx])

    def local(self, x: Sequence) -> tuple:
        d = exact.sub(exact.point(x), self.origin)
        if not self.basis:
            if any(v != 0 for v in d):
                raise ComplexError("point is not in the chart's affine plane")
            return ()
        c = exact.solve(self._cols, d)
        if c is None:
            raise ComplexError("point is not in the chart's affine plane")
        return c

    def contains(self, x: Sequence) -> bool:
        try:
            self.local(x)
            return True
        except ComplexError:
            return False


def signed_chart_volume(points: Sequence[Sequence], chart: Chart) -> Fraction:
    loc = [chart.local(p) for p in points]
    k = len(loc) - 1
    if k != chart.dim:
        raise ComplexError(f"{k}-simplex in a {chart.dim}-dimensional chart")
    if k == 0:
        return Fraction(1)
    m = [exact.sub(p, loc[0]) for p in loc[1:]]
    return exact.det(m) / math.factorial(k)


def chart_volume(points: Sequence[Sequence], chart: Chart) -> Fraction:
    """Exact |det|/k! of the simplex in chart coordinates."""
    return abs(signed_chart_volume(points, chart))


def affinely_independent(points: Sequence[Sequence]) -> bool:
    return gram_determinant([exact.point(p) for p in points]) != 0


# --- subdivision and dual skeleta ------------------------------------------

def barycentric_subdivision(K: SimplicialComplex) -> SimplicialComplex:
    """Bs(K): one vertex per simplex of K, one simplex per flag of faces.

    Vertex ``i`` of the result is labelled by the i-th simplex of K in
    (dimension, lexicographic) order; coordinates are barycenters.
    """
    order = K.all_simplices()
    vid = {s: i for i, s in enumerate(order)}

    def flags(s):
        if len(s) == 1:
            return [(s,)]
        out = []
        for f in itertools.combinations(s, len(s) - 1):
            out.extend(fl + (s,) for fl in flags(f))
        return out

    tops = []
    for s in K.facets():
        for fl in flags(s):
            tops.append([vid[t] for t in fl])
    coords = None
    if K.coords is not None:
        coords = [exact.centroid(K.vertex_points(s)) for s in order]
    return SimplicialComplex(tops, coords=coords, labels=order)


def _check_full(B: SimplicialComplex, sub_vertices: set, sub_simplices: set):
    for s in B.all_simplices():
        if set(s) <= sub_vertices and s not in sub_simplices:
            raise InvariantViolation(f"Bs(K^j) is not full in Bs(K): {s}")


def full_subcomplex_complement(K: SimplicialComplex, j: int) -> SimplicialComplex:
    """Simplices of Bs(K) disjoint from Bs(K^j), as a complex.

    Vertices keep their labels (the K-simplex whose barycenter they are) and
    are renumbered consecutively.
    """
    if not 0 <= j < K.dim:
        raise ComplexError(f"skeleton index {j} out of range for a {K.dim}-complex")
    B = barycentric_subdivision(K)
    low = {i for i, lab in enumerate(B.labels) if len(lab) - 1 <= j}
    sub = {s for s in B.all_simplices() if set(s) <= low and all(len(B.labels[v]) - 1 <= j for v in s)}
    _check_full(B, low, sub)
    keep = [s for s in B.all_simplices() if not (set(s) & low)]
    verts = sorted({v for s in keep for v in s})
    remap = {v: i for i, v in enumerate(verts)}
    coords = [B.coords[v] for v in verts] if B.coords is not None else None
    return SimplicialComplex([[remap[v] for v in s] for s in keep], coords=coords,
                             labels=[B.labels[v] for v in verts], close=False)


def dual_skeleton(K: SimplicialComplex, d: int) -> SimplicialComplex:
    """Simplicial model of the d-skeleton of the dual cell complex of K."""
    defects = K.manifold_defects()
    if defects:
        raise ComplexError("dual skeleton needs a closed manifold: " + defects[0])
    n = K.dim
    if not 0 <= d < n:
        raise ComplexError(f"dual skeleton dimension {d} out of range for n={n}")
    return full_subcomplex_complement(K, n - d - 1)


def dual_euler_characteristic(K: SimplicialComplex, j: int) -> int:
    """sum_{i>j} (-1)^(n-i) f_i: Euler characteristic of the dual (n-j-1)-skeleton."""
    n = K.dim
    return sum((-1) ** (n - i) * K.count(i) for i in range(j + 1, n + 1))


# --- constructions used by fixtures -----------------------------------------

def join(K: SimplicialComplex, L: SimplicialComplex) -> SimplicialComplex:
    """Simplicial join; vertices of L are shifted by K.nverts."""
    off = K.nverts
    sims = list(K.facets()) + [tuple(v + off for v in t) for t in L.facets()]
    for s in K.facets():
        for t in L.facets():
            sims.append(s + tuple(v + off for v in t))
    return SimplicialComplex(sims)


def product(K: SimplicialComplex, L: SimplicialComplex) -> SimplicialComplex:
    """Staircase triangulation of |K| x |L| using the vertex-id orders.

    Vertex (a, b) gets id ``a * L.nverts + b``.
    """
    nl = L.nverts
    tops = []
    for s in K.facets():
        for t in L.facets():
            p, q = len(s) - 1, len(t) - 1
            for ups in itertools.combinations(range(p + q), p):
                i = j = 0
                path = [(s[0], t[0])]
                upset = set(ups)
                for step in range(p + q):
                    if step in upset:
                        i += 1
                    else:
                        j += 1
                    path.append((s[i], t[j]))
                tops.append([a * nl + b for a, b in path])
    coords = None
    if K.coords is not None and L.coords is not None:
        coords = [K.coords[a] + L.coords[b] for a in range(K.nverts) for b in range(nl)]
    return SimplicialComplex(tops, coords=coords)


def quotient(K: SimplicialComplex, generator: Sequence[int], order: int) -> SimplicialComplex:
    """Quotient of K by the free cyclic action generated by a vertex permutation.

    Raises unless the orbit space is itself a simplicial complex (every orbit
    of simplices has ``order`` members and distinct orbits have distinct
    vertex-orbit sets).
    """
    g = list(generator)
    orbit_of: dict[int, int] = {}
    reps = []
    for v in range(K.nverts):
        if v in orbit_of:
            continue
        w = v
        for _ in range(order):
            orbit_of[w] = len(reps)
            w = g[w]
        if w != v:
            raise ComplexError("generator does not have the stated order")
        reps.append(v)
    images = {}
    for s in K.all_simplices():
        img = tuple(sorted(orbit_of[v] for v in s))
        if len(set(img)) != len(img):
            raise ComplexError(f"simplex {s} meets an orbit twice; quotient not simplicial")
        images.setdefault(img, set()).add(s)
    for img, pre in images.items():
        if len(pre) != order:
            raise ComplexError(f"simplices over {img} do not form a single free orbit")
    return SimplicialComplex(images.keys(), close=False)
