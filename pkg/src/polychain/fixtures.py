"""Named test complexes.

The lens space and RP^4 are built as quotients of barycentric subdivisions of
sphere triangulations by free cyclic actions; :func:`simplicial.quotient`
refuses the quotient unless it is a genuine simplicial complex.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from .simplicial import (SimplicialComplex, barycentric_subdivision, join, product,
                         quotient)


def simplex(k: int) -> SimplicialComplex:
    """Standard k-simplex with all faces, vertices at 0 and e_1..e_k."""
    coords = [[int(i == j - 1) for i in range(k)] for j in range(k + 1)]
    return SimplicialComplex([range(k + 1)], coords=coords)


def sphere_boundary(n: int) -> SimplicialComplex:
    """Boundary of the (n+1)-simplex: an n-sphere on n+2 vertices."""
    verts = range(n + 2)
    return SimplicialComplex(itertools.combinations(verts, n + 1))


def circle(n: int = 3) -> SimplicialComplex:
    return SimplicialComplex([(i, (i + 1) % n) for i in range(n)])


def tetrahedron_boundary() -> SimplicialComplex:
    return sphere_boundary(2)


def torus7() -> SimplicialComplex:
    """Moebius' 7-vertex torus."""
    tri = []
    for i in range(7):
        tri.append((i, (i + 1) % 7, (i + 3) % 7))
        tri.append((i, (i + 2) % 7, (i + 3) % 7))
    return SimplicialComplex(tri)


def rp2() -> SimplicialComplex:
    """6-vertex real projective plane (hemi-icosahedron)."""
    tri = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
           (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3)]
    return SimplicialComplex(tri)


def _grid_surface(a: int, b: int, twist: bool) -> SimplicialComplex:
    """a x b grid with periodic identifications; ``twist`` flips the first
    coordinate when wrapping the second, giving a Klein bottle."""
    def vid(i, j):
        if j >= b:
            j -= b
            if twist:
                i = -i
        return (i % a) * b + j

    tri = []
    for i in range(a):
        for j in range(b):
            v00, v10, v01, v11 = vid(i, j), vid(i + 1, j), vid(i, j + 1), vid(i + 1, j + 1)
            tri.append((v00, v10, v11))
            tri.append((v00, v01, v11))
    return SimplicialComplex(tri)


def klein_bottle() -> SimplicialComplex:
    return _grid_surface(4, 4, twist=True)


def torus_grid(a: int = 3, b: int = 3) -> SimplicialComplex:
    return _grid_surface(a, b, twist=False)


def coned_hexagon():
    """(D^2, S^1): a disk as the cone over a hexagon, and its boundary circle."""
    disk = SimplicialComplex([(i, (i + 1) % 6, 6) for i in range(6)])
    rim = SimplicialComplex([(i, (i + 1) % 6) for i in range(6)])
    return disk, rim


@lru_cache(maxsize=None)
def lens_space_31() -> SimplicialComplex:
    """L(3,1) = S^3 / Z_3 with the diagonal rotation (z, w) -> (wz, ww).

    S^3 is the join of two hexagons, Z_3 rotates both by two steps; the
    action is made simplicial-quotient-friendly by one barycentric subdivision.
    """
    S3 = join(circle(6), circle(6))
    g0 = [(i + 2) % 6 for i in range(6)] + [6 + (i + 2) % 6 for i in range(6)]
    B = barycentric_subdivision(S3)
    pos = {s: i for i, s in enumerate(B.labels)}
    g = [pos[tuple(sorted(g0[v] for v in lab))] for lab in B.labels]
    return quotient(B, g, 3)


@lru_cache(maxsize=None)
def rp4() -> SimplicialComplex:
    """RP^4 as the antipodal quotient of Bs(boundary of the 5-cross-polytope)."""
    n = 5
    # vertex 2i = +e_i, 2i+1 = -e_i
    facets = [tuple(2 * i + s for i, s in enumerate(signs)) for signs in itertools.product((0, 1), repeat=n)]
    S4 = SimplicialComplex(facets)
    B = barycentric_subdivision(S4)
    anti = [v ^ 1 for v in range(2 * n)]
    pos = {s: i for i, s in enumerate(B.labels)}
    g = [pos[tuple(sorted(anti[v] for v in lab))] for lab in B.labels]
    return quotient(B, g, 2)


@lru_cache(maxsize=None)
def rp2_x_rp2() -> SimplicialComplex:
    return product(rp2(), rp2())


def unit_square() -> SimplicialComplex:
    """Unit square split along the diagonal (0,0)-(1,1)."""
    coords = [[0, 0], [1, 0], [1, 1], [0, 1]]
    return SimplicialComplex([(0, 1, 2), (0, 2, 3)], coords=coords)


def unit_cube() -> SimplicialComplex:
    """Unit cube as the six Kuhn simplices along the main diagonal."""
    coords = [[(v >> 0) & 1, (v >> 1) & 1, (v >> 2) & 1] for v in range(8)]
    tets = []
    for perm in itertools.permutations(range(3)):
        v = 0
        path = [v]
        for axis in perm:
            v |= 1 << axis
            path.append(v)
        tets.append(tuple(path))
    return SimplicialComplex(tets, coords=coords)


def square_boundary() -> SimplicialComplex:
    coords = [[0, 0], [1, 0], [1, 1], [0, 1]]
    return SimplicialComplex([(0, 1), (1, 2), (2, 3), (0, 3)], coords=coords)


def cube_surface() -> SimplicialComplex:
    """Boundary of the unit cube, each square face split along a diagonal."""
    coords = [[(v >> 0) & 1, (v >> 1) & 1, (v >> 2) & 1] for v in range(8)]
    tri = []
    for axis in range(3):
        for side in (0, 1):
            verts = sorted(v for v in range(8) if (v >> axis) & 1 == side)
            a, b, c, d = verts  # a and d are opposite corners
            tri.append((a, b, d))
            tri.append((a, c, d))
    return SimplicialComplex(tri, coords=coords)


def triangle() -> SimplicialComplex:
    return SimplicialComplex([(0, 1, 2)], coords=[[0, 0], [1, 0], [0, 1]])


HOMOLOGY_FIXTURES = {
    "S1": lambda: circle(4),
    "S2": tetrahedron_boundary,
    "T2": torus7,
    "RP2": rp2,
    "Klein": klein_bottle,
    "L31": lens_space_31,
}


def oracle_groups(name: str, p: int | None) -> list[str]:
    """Classical answer for a fixture over Z or Z/p, written out by hand."""
    table = {
        ("S1", None): ["Z", "Z"],
        ("S2", None): ["Z", "0", "Z"],
        ("T2", None): ["Z", "Z^2", "Z"],
        ("RP2", None): ["Z", "Z2", "0"],
        ("Klein", None): ["Z", "Z + Z2", "0"],
        ("L31", None): ["Z", "Z3", "0", "Z"],
        ("S1", 2): ["Z2", "Z2"], ("S1", 3): ["Z3", "Z3"], ("S1", 5): ["Z5", "Z5"],
        ("S2", 2): ["Z2", "0", "Z2"], ("S2", 3): ["Z3", "0", "Z3"], ("S2", 5): ["Z5", "0", "Z5"],
        ("T2", 2): ["Z2", "Z2^2", "Z2"], ("T2", 3): ["Z3", "Z3^2", "Z3"], ("T2", 5): ["Z5", "Z5^2", "Z5"],
        ("RP2", 2): ["Z2", "Z2", "Z2"], ("RP2", 3): ["Z3", "0", "0"], ("RP2", 5): ["Z5", "0", "0"],
        ("Klein", 2): ["Z2", "Z2^2", "Z2"], ("Klein", 3): ["Z3", "Z3", "0"], ("Klein", 5): ["Z5", "Z5", "0"],
        ("L31", 2): ["Z2", "0", "0", "Z2"], ("L31", 3): ["Z3", "Z3", "Z3", "Z3"],
        ("L31", 5): ["Z5", "0", "0", "Z5"],
    }
    return table[(name, p)]


REGISTRY = {
    "simplex1": lambda: simplex(1),
    "simplex2": lambda: simplex(2),
    "simplex3": lambda: simplex(3),
    "circle": lambda: circle(4),
    "S2": tetrahedron_boundary,
    "S3": lambda: sphere_boundary(3),
    "torus": torus7,
    "rp2": rp2,
    "klein": klein_bottle,
    "lens31": lens_space_31,
    "rp4": rp4,
    "rp2xrp2": rp2_x_rp2,
    "square": unit_square,
    "cube": unit_cube,
    "cube_surface": cube_surface,
    "square_boundary": square_boundary,
}
