"""Refine a triangulation until given convex polytopes are unions of skeleton
simplices.

Each top simplex meeting a polytope P is cut by the hyperplanes describing P
(its affine hull and its facets).  The cells are triangulated by coning over
barycenters, and neighbours whose faces were subdivided are coned over their
own barycenters, lowest dimension first.  Simplices away from P are untouched.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import exact
from .polytope import Polytope, _hulls_meet, point_in_simplex, triangulate_polytope
from .simplicial import Chart, ComplexError, InvariantViolation, SimplicialComplex, chart_volume


class EmbedError(ValueError):
    pass


def _normalize(a: Sequence, b) -> tuple:
    """Projective normal form of the hyperplane a.x = b."""
    v = exact.primitive(list(a) + [b])
    return tuple(v[:-1]), v[-1]


@dataclass
class Cell:
    """Convex cell inside a top simplex: vertices plus an H-description.

    ``eqs`` are (a, b) with a.x = b, ``ineqs`` are (a, b) with a.x <= b.
    """
    points: list
    eqs: list
    ineqs: list

    def polytope(self) -> Polytope:
        return Polytope(self.points, check=False)


def simplex_cell(points: Sequence[Sequence]) -> Cell:
    """H-description of a simplex in its own affine hull: hull equations plus
    barycentric coordinates >= 0."""
    pts = [exact.point(p) for p in points]
    n = len(pts[0])
    v0 = pts[0]
    E = [exact.sub(p, v0) for p in pts[1:]]
    eqs = []
    for a in exact.nullspace(E, n) if E else [tuple(int(i == j) for j in range(n)) for i in range(n)]:
        eqs.append((tuple(Fraction(x) for x in a), exact.dot(a, v0)))
    ineqs = []
    k = len(E)
    if k:
        G = [[exact.dot(e, f) for f in E] for e in E]
        Ginv = _inverse(G)
        # y = Ginv E (x - v0); lambda_j = y_j for j >= 1, lambda_0 = 1 - sum y
        M = [tuple(sum((Ginv[i][j] * E[j][c] for j in range(k)), Fraction(0)) for c in range(n))
             for i in range(k)]
        for row in M:  # -y_i <= 0
            a = tuple(-x for x in row)
            ineqs.append((a, exact.dot(a, v0)))
        s = tuple(sum((row[c] for row in M), Fraction(0)) for c in range(n))  # sum y <= 1
        ineqs.append((s, 1 + exact.dot(s, v0)))
    return Cell(pts, eqs, ineqs)


def _inverse(G):
    k = len(G)
    aug = [list(G[i]) + [Fraction(int(i == j)) for j in range(k)] for i in range(k)]
    R, piv = exact.rref(aug, 2 * k)
    if piv[:k] != list(range(k)):
        raise InvariantViolation("singular Gram matrix for a simplex")
    return [row[k:] for row in R[:k]]


def _is_vertex(x, cell: Cell, extra: Sequence, n: int) -> bool:
    normals = [a for a, _ in cell.eqs] + [a for a in extra]
    normals += [a for a, b in cell.ineqs if exact.dot(a, x) == b]
    return exact.rank(normals) == n


def split_cell(cell: Cell, a: Sequence, b) -> list[Cell]:
    """Cut ``cell`` by the hyperplane a.x = b; a cell on one side is kept whole."""
    s = [exact.dot(a, p) - b for p in cell.points]
    if all(v >= 0 for v in s) or all(v <= 0 for v in s):
        return [cell]
    n = len(cell.points[0])
    cuts = []
    for i in range(len(s)):
        for j in range(i + 1, len(s)):
            if s[i] * s[j] < 0:
                t = s[i] / (s[i] - s[j])
                p, q = cell.points[i], cell.points[j]
                x = tuple(pi + t * (qi - pi) for pi, qi in zip(p, q))
                if x not in cuts and _is_vertex(x, cell, [a], n):
                    cuts.append(x)
    on = [p for p, v in zip(cell.points, s) if v == 0]
    neg = tuple(-x for x in a)
    lo = Cell([p for p, v in zip(cell.points, s) if v < 0] + on + cuts, list(cell.eqs),
              cell.ineqs + [(tuple(a), b)])
    hi = Cell([p for p, v in zip(cell.points, s) if v > 0] + on + cuts, list(cell.eqs),
              cell.ineqs + [(neg, -b)])
    return [lo, hi]


def halfspace_split(T: Sequence[Sequence], H: Sequence) -> list[Polytope]:
    """Cut simplex ``T`` successively by each hyperplane ``(a, b)`` in ``H``."""
    cells = [simplex_cell(T)]
    for a, b in H:
        a = tuple(exact.to_q(x) for x in a)
        b = exact.to_q(b)
        nxt = []
        for c in cells:
            nxt.extend(split_cell(c, a, b))
        cells = nxt
    return [c.polytope() for c in cells]


def polytope_hyperplanes(P: Polytope) -> tuple[list, list]:
    """Affine-hull equations and facet halfspaces of P, both as (a, b).

    Facet normals are taken inside the direction space of P (rational
    Gram-Schmidt), so they are meaningful when P is lower-dimensional.
    Halfspaces are oriented so that P satisfies a.x <= b.
    """
    n = P.ambient_dim
    x0 = P.points[0]
    E = [exact.sub(p, x0) for p in P.points[1:]]
    basis = exact.gram_schmidt(E) if E else []
    eqs = []
    for a in exact.nullspace(basis, n) if basis else [tuple(int(i == j) for j in range(n)) for i in range(n)]:
        eqs.append(_normalize(a, exact.dot(a, x0)))
    ineqs = []
    L = P.faces()
    if P.dim >= 1:
        for F in L.faces[P.dim - 1]:
            # normal in dir(P) orthogonal to the facet's directions
            fpts = [P.points[i] for i in F]
            fdir = [exact.sub(p, fpts[0]) for p in fpts[1:]]
            g = _normal_within(basis, fdir)
            b = exact.dot(g, fpts[0])
            other = next(p for i, p in enumerate(P.points) if i not in F)
            if exact.dot(g, other) > b:
                g = tuple(-x for x in g)
                b = -b
            ineqs.append(_normalize(g, b))
    return _dedupe(eqs), _dedupe(ineqs)


def _normal_within(basis, fdir):
    """Vector in span(basis) orthogonal to span(fdir) (one-dimensional)."""
    k = len(basis)
    rows = [[exact.dot(f, b) for b in basis] for f in fdir]
    ns = exact.nullspace(rows, k) if rows else [tuple(int(i == 0) for i in range(k))]
    c = ns[0]
    n = len(basis[0])
    return tuple(sum((c[i] * basis[i][j] for i in range(k)), Fraction(0)) for j in range(n))


def _dedupe(hs):
    out = []
    seen = set()
    for a, b in hs:
        key = _normalize(a, b)
        neg = _normalize(tuple(-x for x in a), -b)
        if key in seen or neg in seen:
            continue
        seen.add(key)
        out.append(key)
    return out


def _in_halfspaces(x, eqs, ineqs) -> bool:
    return all(exact.dot(a, x) == b for a, b in eqs) and all(exact.dot(a, x) <= b for a, b in ineqs)


@dataclass
class RefinementPlan:
    """What one polytope did to the complex.

    ``affected`` are the top simplices meeting P (input vertex ids),
    ``hyperplanes`` the cut list, and ``frontier[k]`` the k-simplices of the
    input that were coned over their barycenter for compatibility.
    """
    polytope: Polytope
    affected: list = field(default_factory=list)
    hyperplanes: list = field(default_factory=list)
    frontier: dict = field(default_factory=dict)
    skipped: bool = False

    def to_json(self) -> dict:
        return {
            "affected": [list(t) for t in self.affected],
            "hyperplanes": [{"a": [exact.q_str(x) for x in a], "b": exact.q_str(b)}
                            for a, b in self.hyperplanes],
            "frontier": {str(k): [list(s) for s in v] for k, v in sorted(self.frontier.items())},
            "skipped": self.skipped,
        }


@dataclass
class Refinement:
    complex: SimplicialComplex
    plans: list

    def affected_star(self, K: SimplicialComplex) -> set:
        return affected_star(K, [t for pl in self.plans for t in pl.affected])


def contained_simplices(K: SimplicialComplex, P: Polytope, m: int | None = None) -> list[tuple]:
    """m-simplices of K lying in P (all vertices in P, exact)."""
    m = P.dim if m is None else m
    eqs, ineqs = polytope_hyperplanes(P)
    inside = {v: _in_halfspaces(K.coords[v], eqs, ineqs) for v in range(K.nverts)}
    return [s for s in K.simplices(m) if all(inside[v] for v in s)]


def is_embedded(K: SimplicialComplex, P: Polytope) -> bool:
    """Is P exactly a union of P.dim-simplices of K?  Exact chart-volume test."""
    if P.dim > K.dim:
        return False
    pieces = contained_simplices(K, P)
    got = sum((chart_volume(K.vertex_points(s), P.chart) for s in pieces), Fraction(0))
    return got == P.volume()


def _check_inside(K: SimplicialComplex, P: Polytope):
    tops = K.facets()
    for x in P.points:
        if not any(point_in_simplex(x, K.vertex_points(t)) for t in tops):
            raise EmbedError(f"polytope point {[exact.q_str(c) for c in x]} lies outside the complex")


def _barycentric_support(x, pts) -> tuple:
    """Indices of ``pts`` (a simplex) carrying positive weight at ``x``."""
    chart = Chart.spanning(pts)
    loc = chart.local(x)
    verts = [chart.local(p) for p in pts]
    k = len(verts) - 1
    if k == 0:
        return (0,)
    M = [[verts[j + 1][i] - verts[0][i] for j in range(k)] for i in range(k)]
    lam = exact.solve(M, exact.sub(loc, verts[0]))
    full = [1 - sum(lam)] + list(lam)
    if any(v < 0 for v in full):
        raise InvariantViolation("refined point escapes its carrier simplex")
    return tuple(i for i, v in enumerate(full) if v > 0)


def _embed_one(K: SimplicialComplex, P: Polytope) -> tuple[SimplicialComplex, RefinementPlan]:
    plan = RefinementPlan(P)
    if K.coords is None:
        raise EmbedError("refinement needs vertex coordinates")
    if P.ambient_dim != K.ambient_dim:
        raise EmbedError("polytope and complex live in different spaces")
    _check_inside(K, P)
    if is_embedded(K, P):
        plan.skipped = True
        return K, plan
    eqs, ineqs = polytope_hyperplanes(P)
    cuts = eqs + ineqs
    plan.hyperplanes = cuts
    tops = sorted(K.facets())
    affected = [t for t in tops if _hulls_meet(K.vertex_points(t), P.points)]
    plan.affected = affected

    # subdivision of every face of an affected top, as tuples of coordinates
    sub: dict[tuple, list] = {}
    for t in affected:
        tp = K.vertex_points(t)
        cells = [simplex_cell(tp)]
        for a, b in cuts:
            nxt = []
            for c in cells:
                nxt.extend(split_cell(c, a, b))
            cells = nxt
        pieces = []
        for c in cells:
            T = triangulate_polytope(c.polytope())
            pieces.extend(tuple(T.points[i] for i in s) for s in T.simplices)
        support = {}
        for s in pieces:
            for x in s:
                if x not in support:
                    support[x] = _barycentric_support(x, tp)
        local: dict[tuple, set] = {}
        for s in pieces:
            for face in _all_faces(s):
                sup = tuple(sorted(set().union(*(support[x] for x in face))))
                if len(sup) == len(face):
                    local.setdefault(tuple(t[i] for i in sup), set()).add(tuple(sorted(face)))
        for f, simps in local.items():
            simps = sorted(simps)
            if f in sub and sorted(sub[f]) != simps:
                raise InvariantViolation(f"incompatible subdivisions of face {f}")
            sub[f] = simps

    coned: dict[int, list] = {}

    def resolve(f: tuple) -> list:
        if f in sub:
            return sub[f]
        if len(f) == 1:
            out = [(K.coords[f[0]],)]
        else:
            parts = [resolve(g) for g in _facets(f)]
            if all(len(p) == 1 and p[0] == tuple(sorted(K.coords[v] for v in g))
                   for p, g in zip(parts, _facets(f))):
                out = [tuple(sorted(K.coords[v] for v in f))]
            else:
                b = exact.centroid([K.coords[v] for v in f])
                out = [tuple(sorted(piece + (b,))) for p in parts for piece in p]
                coned.setdefault(len(f) - 1, []).append(f)
        sub[f] = out
        return out

    new_tops = []
    aff_set = set(affected)
    for t in tops:
        new_tops.extend(resolve(t) if t not in aff_set else sub[t])
    plan.frontier = {k: sorted(v) for k, v in sorted(coned.items())}
    return _assemble(K, new_tops), plan


def _facets(f: tuple) -> list[tuple]:
    return [f[:i] + f[i + 1:] for i in range(len(f))]


def _all_faces(s: tuple):
    for k in range(1, len(s) + 1):
        yield from itertools.combinations(s, k)


def _assemble(K: SimplicialComplex, tops: list) -> SimplicialComplex:
    coords = list(K.coords)
    pos = {c: i for i, c in enumerate(coords)}
    simplices = []
    for s in tops:
        ids = []
        for x in s:
            if x not in pos:
                pos[x] = len(coords)
                coords.append(x)
            ids.append(pos[x])
        simplices.append(tuple(sorted(ids)))
    return SimplicialComplex(simplices, coords=coords)


def embed(K: SimplicialComplex, polys: Sequence) -> Refinement:
    """Process the polytopes one at a time, in input order."""
    plans = []
    cur = K
    for P in polys:
        if not isinstance(P, Polytope):
            P = Polytope(P)
        cur, plan = _embed_one(cur, P)
        plans.append(plan)
    for P in (pl.polytope for pl in plans):
        if not is_embedded(cur, P):
            raise InvariantViolation("polytope is not a union of skeleton simplices after refinement")
    return Refinement(cur, plans)


def refine_to_embed(K: SimplicialComplex, polys: Sequence) -> SimplicialComplex:
    """Refinement of K in which every polytope is a union of simplices of its dimension."""
    for P in polys:
        d = P.dim if isinstance(P, Polytope) else Polytope(P).dim
        if d > K.dim:
            raise EmbedError(f"polytope of dimension {d} in a {K.dim}-dimensional complex")
    return embed(K, polys).complex


def refine_in_polyhedron(K: SimplicialComplex, polys: Sequence) -> SimplicialComplex:
    """Same as :func:`refine_to_embed` for a triangulated PL manifold sitting
    in a higher-dimensional space; cuts happen inside each simplex's hull."""
    defects = K.manifold_defects()
    if defects:
        raise EmbedError(f"polyhedron is not a PL manifold: {defects[0]}")
    return refine_to_embed(K, polys)


# --- audits ------------------------------------------------------------------

def affected_star(K: SimplicialComplex, affected: Sequence[tuple]) -> set:
    """Closed star of the affected tops: every face of a top sharing a vertex
    with one of them."""
    verts = {v for t in affected for v in t}
    out = set()
    for t in K.facets():
        if verts & set(t):
            out.update(_all_faces(t))
    return out


def carrier(x, K: SimplicialComplex) -> tuple:
    """Smallest simplex of K containing point x."""
    for t in K.facets():
        pts = K.vertex_points(t)
        if point_in_simplex(x, pts):
            sup = _barycentric_support(x, pts)
            return tuple(t[i] for i in sup)
    raise EmbedError("point outside the complex")


def locality_report(K: SimplicialComplex, out: SimplicialComplex, affected: Sequence[tuple]) -> dict:
    """Input simplices away from the affected star must survive verbatim, and
    no new simplex may sit outside it."""
    star = affected_star(K, affected)
    lost = []
    for s in K.all_simplices():
        if s in star:
            continue
        if s not in out or any(out.coords[v] != K.coords[v] for v in s):
            lost.append(s)
    star_set = set(star)
    stray = []
    for s in out.facets():
        if s in K and all(out.coords[v] == K.coords[v] for v in s):
            continue
        b = exact.centroid(out.vertex_points(s))
        c = carrier(b, K)
        if c not in star_set:
            stray.append(s)
    return {"preserved_violations": lost, "stray_refined": stray}


def refines(K: SimplicialComplex, out: SimplicialComplex) -> bool:
    """Each output simplex lies in a single input simplex, and carriers
    respect faces."""
    car = {}
    for v in range(out.nverts):
        car[v] = carrier(out.coords[v], K)
    for s in out.facets():
        union = set().union(*(car[v] for v in s))
        if tuple(sorted(union)) not in K:
            return False
    return True


def in_union(x, K: SimplicialComplex, simplices: Sequence[tuple]) -> bool:
    x = exact.point(x)
    for s in simplices:
        pts = K.vertex_points(s)
        if any(c < min(col) or c > max(col) for c, col in zip(x, zip(*pts))):
            continue
        if point_in_simplex(x, pts):
            return True
    return False
