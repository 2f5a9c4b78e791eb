"""Random generators shared by the test modules."""

import random
from fractions import Fraction as F

from polychain import exact
from polychain.chains import Chain
from polychain.polytope import Polytope
from polychain.simplicial import SimplicialComplex


def rq(rng: random.Random, lo=-8, hi=8, dens=(1, 2, 3, 4)) -> F:
    return F(rng.randint(lo, hi), rng.choice(dens))


def random_polytope(rng: random.Random, d: int, n: int) -> Polytope:
    """Hull of n random rational points in R^d, full-dimensional."""
    while True:
        pts = list({tuple(rq(rng) for _ in range(d)) for _ in range(n)})
        if len(pts) < d + 1:
            continue
        P = Polytope.hull(pts)
        if P.dim == d:
            return P


def random_invertible(rng: random.Random, d: int):
    while True:
        A = [[rq(rng, -4, 4) for _ in range(d)] for _ in range(d)]
        if exact.det(A) != 0:
            return A


def random_chain(rng: random.Random, K: SimplicialComplex, k: int, density=0.5, bound=3) -> Chain:
    terms = {}
    for s in K.simplices(k):
        if rng.random() < density:
            c = rng.randint(-bound, bound)
            if c:
                terms[s] = c
    return Chain(K, k, terms)


def coned_polygon(rng: random.Random, n: int, jitter=True) -> SimplicialComplex:
    """Star-shaped disc: a convex n-gon coned from an interior point."""
    import math
    coords = [(F(0), F(0))]
    for i in range(n):
        a = 2 * math.pi * i / n
        r = F(rng.randint(6, 10), 8) if jitter else F(1)
        coords.append((F(round(1000 * math.cos(a)), 1000) * r, F(round(1000 * math.sin(a)), 1000) * r))
    tri = [(0, 1 + i, 1 + (i + 1) % n) for i in range(n)]
    return SimplicialComplex(tri, coords=coords)


def grid_square(rng: random.Random, a: int, b: int, jitter=True) -> SimplicialComplex:
    coords = []
    for i in range(a + 1):
        for j in range(b + 1):
            dx = F(rng.randint(-1, 1), 16) if jitter and 0 < i < a else 0
            dy = F(rng.randint(-1, 1), 16) if jitter and 0 < j < b else 0
            coords.append((F(i) + dx, F(j) + dy))
    vid = lambda i, j: i * (b + 1) + j
    tri = []
    for i in range(a):
        for j in range(b):
            tri.append((vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)))
            tri.append((vid(i, j), vid(i, j + 1), vid(i + 1, j + 1)))
    return SimplicialComplex(tri, coords=coords)
