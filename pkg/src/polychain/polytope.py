"""Convex polytopes given by their extremal points, face lattices, and the
barycentric coning triangulation.

Everything is exact.  Faces are found combinatorially inside a rational chart
of the polytope's affine hull: a facet is the set of points lying on a
hyperplane spanned by ``d`` of them that leaves every other point on one side.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import exact
from .lp import OPTIMAL, linprog_exact
from .simplicial import Chart, ComplexError, InvariantViolation, SimplicialComplex, chart_volume

MAX_DIM = int(os.environ.get("POLYCHAIN_MAX_POLYTOPE_DIM", 6))
MAX_POINTS = int(os.environ.get("POLYCHAIN_MAX_POLYTOPE_POINTS", 64))


class GuardExceeded(RuntimeError):
    """Input exceeds a configured size limit."""


class PolytopeError(ValueError):
    pass


def in_convex_hull(x: Sequence, points: Sequence[Sequence]) -> bool:
    """Exact LP test: is ``x`` a convex combination of ``points``?"""
    if not points:
        return False
    n = len(x)
    A = [[p[i] for p in points] for i in range(n)] + [[1] * len(points)]
    b = list(x) + [1]
    return linprog_exact([0] * len(points), A, b).status == OPTIMAL


def extremal_subset(points: Sequence[Sequence]) -> list:
    """Indices of the points that are not convex combinations of the others
    (duplicates keep their first occurrence)."""
    pts = [exact.point(p) for p in points]
    keep = []
    seen = set()
    uniq = []
    for i, p in enumerate(pts):
        if p not in seen:
            seen.add(p)
            uniq.append(i)
    for i in uniq:
        others = [pts[j] for j in uniq if j != i]
        if not in_convex_hull(pts[i], others):
            keep.append(i)
    return keep


class Polytope:
    """Convex hull of finitely many rational points, all of them extremal."""

    def __init__(self, points: Sequence[Sequence], check: bool = True):
        if not points:
            raise PolytopeError("empty polytope")
        self.points: tuple = tuple(exact.point(p) for p in points)
        if len({len(p) for p in self.points}) != 1:
            raise PolytopeError("points of different ambient dimension")
        if len(self.points) > MAX_POINTS:
            raise GuardExceeded(f"{len(self.points)} extremal points > {MAX_POINTS}")
        if len(set(self.points)) != len(self.points):
            raise PolytopeError("repeated point")
        self.chart = Chart.spanning(self.points)
        if self.dim > MAX_DIM:
            raise GuardExceeded(f"polytope dimension {self.dim} > {MAX_DIM}")
        if check:
            ext = extremal_subset(self.points)
            if len(ext) != len(self.points):
                bad = next(i for i in range(len(self.points)) if i not in ext)
                raise PolytopeError(f"point {bad} is not extremal")
        self._lattice = None

    @classmethod
    def hull(cls, points: Sequence[Sequence]) -> "Polytope":
        """Polytope spanned by arbitrary points (non-extremal ones dropped)."""
        pts = [exact.point(p) for p in points]
        return cls([pts[i] for i in extremal_subset(pts)], check=False)

    @property
    def dim(self) -> int:
        return self.chart.dim

    @property
    def ambient_dim(self) -> int:
        return len(self.points[0])

    def is_simplex(self) -> bool:
        return len(self.points) == self.dim + 1

    def local_points(self) -> list[tuple]:
        return [self.chart.local(p) for p in self.points]

    def faces(self) -> "FaceLattice":
        if self._lattice is None:
            self._lattice = enumerate_faces(self)
        return self._lattice

    def volume(self) -> Fraction:
        """Exact chart volume, by pulling triangulation from the first vertex.

        This route shares only the face lattice with :func:`triangulate_polytope`.
        """
        L = self.faces()
        total = Fraction(0)
        for s in pulling_triangulation(L):
            total += chart_volume([self.points[i] for i in s], self.chart)
        return total

    def contains(self, x: Sequence) -> bool:
        return in_convex_hull(exact.point(x), self.points)

    def map(self, A: Sequence[Sequence], t: Sequence) -> "Polytope":
        """Image under ``x -> A x + t`` (A invertible keeps extremality)."""
        return Polytope([affine_apply(A, t, p) for p in self.points], check=False)

    def to_json(self) -> dict:
        return {"points": [[exact.q_str(c) for c in p] for p in self.points]}

    def __repr__(self):
        return f"Polytope(dim={self.dim}, points={len(self.points)})"


def affine_apply(A, t, p) -> tuple:
    return tuple(sum((Fraction(a) * x for a, x in zip(row, p)), Fraction(0)) + Fraction(ti)
                 for row, ti in zip(A, t))


@dataclass
class FaceLattice:
    """All faces of a polytope as sorted tuples of point indices.

    ``faces[k]`` lists the k-faces in lexicographic order; ``facets_of`` maps a
    face to its codimension-one faces.
    """
    polytope: Polytope
    faces: dict = field(default_factory=dict)
    facets_of: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.polytope.dim

    def counts(self) -> list[int]:
        return [len(self.faces.get(k, ())) for k in range(self.dim + 1)]

    def dim_of(self, face: tuple) -> int:
        return self._dim[face]

    def __post_init__(self):
        self._dim = {}

    def all_faces(self) -> list[tuple]:
        return [f for k in range(self.dim + 1) for f in self.faces.get(k, ())]


def _facets(idx: tuple, loc: dict, d: int) -> list[tuple]:
    """Facets of the d-polytope on ``idx`` with local coordinates ``loc``."""
    if d == 1:
        # two endpoints; order along the line
        return [(i,) for i in idx]
    found = set()
    for sub in itertools.combinations(idx, d):
        if any(set(sub) <= set(f) for f in found):
            continue
        rows = [list(loc[i]) + [1] for i in sub]
        ns = exact.nullspace(rows, d + 1)
        if len(ns) != 1:
            continue
        h = ns[0]
        vals = {i: exact.dot(h[:-1], loc[i]) + h[-1] for i in idx}
        pos = any(v > 0 for v in vals.values())
        neg = any(v < 0 for v in vals.values())
        if pos and neg:
            continue
        found.add(tuple(sorted(i for i, v in vals.items() if v == 0)))
    return sorted(found)


def enumerate_faces(P: Polytope) -> FaceLattice:
    """Complete face lattice of ``P``, the polytope itself included."""
    n = len(P.points)
    d = P.dim
    if n == 0:
        raise PolytopeError("empty polytope")
    L = FaceLattice(P)
    top = tuple(range(n))
    pending = [(top, d)]
    seen = {top: d}
    while pending:
        face, k = pending.pop()
        if k == 0:
            L.facets_of[face] = []
            continue
        if len(face) == k + 1:
            subs = [tuple(c) for c in itertools.combinations(face, k)]
        else:
            sub_chart = Chart.spanning([P.points[i] for i in face])
            loc = {i: sub_chart.local(P.points[i]) for i in face}
            subs = _facets(face, loc, k)
        L.facets_of[face] = subs
        for g in subs:
            if g not in seen:
                seen[g] = k - 1
                pending.append((g, k - 1))
    for face, k in seen.items():
        L.faces.setdefault(k, []).append(face)
        L._dim[face] = k
    for k in L.faces:
        L.faces[k].sort()
    if L.faces.get(0) and len(L.faces[0]) != n:
        raise InvariantViolation("vertex set of the face lattice differs from the extremal points")
    return L


def barycenter(points: Sequence[Sequence]) -> tuple:
    """Equal-weight average of the given extremal points."""
    if not points:
        raise PolytopeError("barycenter of an empty face")
    return exact.centroid(points)


def pulling_triangulation(L: FaceLattice) -> list[tuple]:
    """Triangulation pulled from the smallest vertex of each face (no new points)."""
    memo = {}

    def pull(face):
        if face in memo:
            return memo[face]
        k = L.dim_of(face)
        if k == 0:
            out = [face]
        else:
            v = face[0]
            out = []
            for g in L.facets_of[face]:
                if v in g:
                    continue
                out.extend((v,) + s for s in pull(g))
        memo[face] = out
        return out

    top = L.faces[L.dim][0]
    return pull(top)


@dataclass
class PolytopeTriangulation:
    """Simplices of a triangulated polytope.

    ``points`` holds every vertex used (extremal points first, then face
    barycenters) and ``tags`` records where each came from: ``("v", i)`` for
    extremal point ``i`` or ``("b", face)`` for the barycenter of ``face``.
    """
    polytope: Polytope | None
    points: list
    tags: list
    simplices: list

    def simplex_points(self, s: tuple) -> list:
        return [self.points[i] for i in s]

    def vertex_sets(self) -> set:
        return {frozenset(self.points[i] for i in s) for s in self.simplices}

    def __len__(self):
        return len(self.simplices)

    def total_volume(self, chart: Chart | None = None) -> Fraction:
        if chart is None:
            chart = self.polytope.chart if self.polytope is not None else Chart.spanning(self.points)
        return sum((chart_volume(self.simplex_points(s), chart) for s in self.simplices), Fraction(0))

    def to_complex(self) -> SimplicialComplex:
        return SimplicialComplex(self.simplices, coords=self.points)

    def to_json(self) -> dict:
        def tag(t):
            return {"kind": "extremal", "point": t[1]} if t[0] == "v" else \
                {"kind": "barycenter", "face": list(t[1])}
        return {
            "dim": len(self.simplices[0]) - 1 if self.simplices else -1,
            "vertices": [[exact.q_str(c) for c in p] for p in self.points],
            "provenance": [tag(t) for t in self.tags],
            "simplices": [list(s) for s in self.simplices],
        }


def triangulate_polytope(P: Polytope) -> PolytopeTriangulation:
    """Triangulate ``P`` by coning every non-simplex face over its barycenter.

    Faces are handled by increasing dimension; a face that already is a
    simplex stays whole, so a simplex comes back as a single piece.
    """
    L = P.faces()
    points = list(P.points)
    tags = [("v", i) for i in range(len(points))]
    bary_index = {}
    memo: dict[tuple, list] = {}

    for k in range(P.dim + 1):
        for face in L.faces.get(k, ()):
            if len(face) == k + 1:
                memo[face] = [face]
                continue
            b = barycenter([P.points[i] for i in face])
            bi = len(points)
            points.append(b)
            tags.append(("b", face))
            bary_index[face] = bi
            pieces = []
            for g in L.facets_of[face]:
                pieces.extend(s + (bi,) for s in memo[g])
            memo[face] = pieces
    top = L.faces[P.dim][0]
    simplices = [tuple(s) for s in memo[top]]
    return PolytopeTriangulation(P, points, tags, simplices)


# --- exact intersection checks ---------------------------------------------

def _bbox(pts):
    return [(min(c), max(c)) for c in zip(*pts)]


def _bbox_disjoint(a, b) -> bool:
    return any(x1 < y0 or y1 < x0 for (x0, x1), (y0, y1) in zip(a, b))


def simplices_meet_properly(s: Sequence[Sequence], t: Sequence[Sequence]) -> bool:
    """True iff conv(s) and conv(t) are disjoint or meet exactly in the hull
    of their shared vertices.  Both vertex lists must be affinely independent.

    One exact LP: over the intersection, maximize the barycentric weight that
    ``s`` puts on vertices not shared with ``t``; the answer must be zero.
    """
    s = [exact.point(p) for p in s]
    t = [exact.point(p) for p in t]
    if _bbox_disjoint(_bbox(s), _bbox(t)):
        return True
    common = set(s) & set(t)
    ns, nt = len(s), len(t)
    n = len(s[0])
    A = []
    b = []
    A.append([1] * ns + [0] * nt)
    b.append(1)
    A.append([0] * ns + [1] * nt)
    b.append(1)
    for i in range(n):
        A.append([p[i] for p in s] + [-q[i] for q in t])
        b.append(0)
    c = [-1 if p not in common else 0 for p in s] + [0] * nt
    res = linprog_exact(c, A, b)
    if res.status != OPTIMAL:
        return True
    return res.value == 0


def check_pairwise(simplices: Sequence[Sequence[Sequence]]) -> list[tuple[int, int]]:
    """Pairs of simplices whose intersection is not a common face."""
    bad = []
    boxes = [_bbox(s) for s in simplices]
    for i in range(len(simplices)):
        for j in range(i + 1, len(simplices)):
            if _bbox_disjoint(boxes[i], boxes[j]):
                continue
            if not simplices_meet_properly(simplices[i], simplices[j]):
                bad.append((i, j))
    return bad


def point_in_simplex(x: Sequence, s: Sequence[Sequence]) -> bool:
    """Closed-simplex membership via exact barycentric coordinates."""
    x = exact.point(x)
    s = [exact.point(p) for p in s]
    chart = Chart.spanning(s)
    if not chart.contains(x):
        return False
    loc = chart.local(x)
    verts = [chart.local(p) for p in s]
    k = len(verts) - 1
    if k == 0:
        return True
    M = [[verts[j + 1][i] - verts[0][i] for j in range(k)] for i in range(k)]
    lam = exact.solve(M, exact.sub(loc, verts[0]))
    return all(v >= 0 for v in lam) and sum(lam) <= 1


def glue_triangulations(T1: PolytopeTriangulation, T2: PolytopeTriangulation) -> PolytopeTriangulation:
    """Union of two triangulations whose polytopes meet in a common face.

    The shared point set must be a face of both polytopes (or empty), and
    every cross pair of simplices is then verified exactly.
    """
    P1, P2 = T1.polytope, T2.polytope
    shared = set(P1.points) & set(P2.points)
    for P in (P1, P2):
        if not shared:
            break
        idx = tuple(sorted(i for i, p in enumerate(P.points) if p in shared))
        if idx not in P.faces()._dim:
            raise PolytopeError("shared points do not form a face of both polytopes")
    if not shared:
        # a common face could only be empty; the hulls must not meet
        if _hulls_meet(P1.points, P2.points):
            raise PolytopeError("polytopes intersect but share no face")
    points = []
    tags = []
    pos = {}

    def idx(p, tag):
        if p not in pos:
            pos[p] = len(points)
            points.append(p)
            tags.append(tag)
        return pos[p]

    out = []
    for which, T in ((1, T1), (2, T2)):
        for s in T.simplices:
            out.append(tuple(sorted(idx(T.points[i], (which,) + tuple(T.tags[i])) for i in s)))
    s1 = [T1.simplex_points(s) for s in T1.simplices]
    s2 = [T2.simplex_points(s) for s in T2.simplices]
    boxes2 = [_bbox(s) for s in s2]
    for a in s1:
        ba = _bbox(a)
        for b, bb in zip(s2, boxes2):
            if _bbox_disjoint(ba, bb):
                continue
            if not simplices_meet_properly(a, b):
                raise PolytopeError("intersection of the two polytopes is not a common face")
    return PolytopeTriangulation(None, points, tags, out)


def _hulls_meet(a, b) -> bool:
    n = len(a[0])
    A = [[1] * len(a) + [0] * len(b), [0] * len(a) + [1] * len(b)]
    rhs = [1, 1]
    for i in range(n):
        A.append([p[i] for p in a] + [-q[i] for q in b])
        rhs.append(0)
    return linprog_exact([0] * (len(a) + len(b)), A, rhs).status == OPTIMAL


def simplex_count_formula(P: Polytope) -> int:
    """Number of top pieces the coning algorithm produces, from the lattice alone."""
    L = P.faces()
    memo = {}
    for k in range(P.dim + 1):
        for f in L.faces.get(k, ()):
            memo[f] = 1 if len(f) == k + 1 else sum(memo[g] for g in L.facets_of[f])
    return memo[L.faces[P.dim][0]]

