"""Acceptance suite: one test per criterion, each at its stated tolerance and
runtime.  A pass/fail line per criterion is printed in the terminal summary.

Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import math
import os
import random
import subprocess
import sys
import time
from fractions import Fraction as F
from pathlib import Path

import mpmath
import numpy as np
import pytest

from helpers import coned_polygon, grid_square, random_chain, random_invertible, random_polytope, rq
from polychain import deform as df
from polychain import fixtures as fx
from polychain import steenrod as st
from polychain.chains import Chain, boundary, mass
from polychain.cohomology import (ModPCohomology, bockstein, cup_product, homology, pullback,
                                  uct_predicted_dims)
from polychain.embed import contained_simplices, embed, in_union, locality_report
from polychain.flatnorm import (LP_EXACT, boundary_triangle_complex, crossover_scale, flat_norm_bruteforce,
                                flat_norm_lp)
from polychain.polytope import (Polytope, check_pairwise, glue_triangulations, point_in_simplex,
                                triangulate_polytope)
from polychain.simplicial import (Chart, SimplicialComplex, barycentric_subdivision, chart_volume,
                                  dual_euler_characteristic, full_subcomplex_complement)


def _timed(limit):
    class T:
        def __enter__(self):
            self.t0 = time.perf_counter()
            return self

        def __exit__(self, *exc):
            self.elapsed = time.perf_counter() - self.t0
            if exc[0] is None:
                assert self.elapsed < limit, f"took {self.elapsed:.1f} s, limit {limit} s"
    return T()


# 1 -----------------------------------------------------------------------------

def test_criterion_01_boundary_soundness():
    rng = random.Random(101)
    bases = [fx.simplex(3), fx.tetrahedron_boundary(), fx.torus7(), fx.rp2(), fx.klein_bottle()]
    refined = []
    for K in bases:
        rounds = rng.randint(1, 2) if K.dim <= 2 else 1
        for _ in range(rounds):
            K = barycentric_subdivision(K)
        perm = list(range(K.nverts))
        rng.shuffle(perm)  # random labels scramble the induced orientations
        refined.append(K.relabel(dict(enumerate(perm))))
    with _timed(30):
        checked = 0
        for i in range(1000):
            K = refined[i % len(refined)]
            k = rng.randint(2, K.dim)
            c = random_chain(rng, K, k, density=rng.uniform(0.05, 0.6), bound=5)
            assert boundary(boundary(c)) == Chain.zero(K, k - 2)
            checked += 1
    assert checked == 1000


# 2 -----------------------------------------------------------------------------

def _cube(d):
    import itertools
    return Polytope([tuple(F(c) for c in v) for v in itertools.product((0, 1), repeat=d)])


def test_criterion_02_coning_triangulation():
    with _timed(60):
        simplex = Polytope([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
        assert len(triangulate_polytope(simplex).simplices) == 1
        assert len(triangulate_polytope(_cube(2)).simplices) == 4
        assert len(triangulate_polytope(_cube(3)).simplices) == 24
        rng = random.Random(202)
        for _ in range(50):
            d = rng.randint(1, 4)
            P = random_polytope(rng, d, rng.randint(d + 1, 12))
            assert len(P.points) <= 12
            T = triangulate_polytope(P)
            # the pieces partition P: chart volumes add up to the volume
            # obtained from an unrelated (pulling) triangulation
            total = sum((chart_volume(T.simplex_points(s), P.chart) for s in T.simplices), F(0))
            assert total == P.volume()
            assert all(chart_volume(T.simplex_points(s), P.chart) > 0 for s in T.simplices)


# 3 -----------------------------------------------------------------------------

def test_criterion_03_affine_image_commutes():
    rng = random.Random(303)
    polys = [random_polytope(rng, rng.randint(2, 3), rng.randint(4, 8)) for _ in range(10)]
    for P in polys:
        T = triangulate_polytope(P)
        for _ in range(100):
            d = P.ambient_dim
            A = random_invertible(rng, d)
            t = [rq(rng) for _ in range(d)]

            def img(p):
                return tuple(sum((a * x for a, x in zip(row, p)), F(0)) + ti for row, ti in zip(A, t))

            TQ = triangulate_polytope(P.map(A, t))
            mapped = {frozenset(img(p) for p in T.simplex_points(s)) for s in T.simplices}
            direct = {frozenset(TQ.simplex_points(s)) for s in TQ.simplices}
            assert mapped == direct


# 4 -----------------------------------------------------------------------------

def _face_sharing_pair(rng):
    d = rng.randint(2, 3)
    while True:
        base = list({tuple(rq(rng) for _ in range(d - 1)) + (F(0),) for _ in range(rng.randint(d, d + 3))})
        up = [tuple(rq(rng) for _ in range(d - 1)) + (F(rng.randint(1, 6), rng.randint(1, 3)),)
              for _ in range(rng.randint(1, 3))]
        dn = [tuple(rq(rng) for _ in range(d - 1)) + (-F(rng.randint(1, 6), rng.randint(1, 3)),)
              for _ in range(rng.randint(1, 3))]
        if len(base) < d:
            continue
        face = Polytope.hull(base)
        if face.dim != d - 1:
            continue
        P1 = Polytope.hull(list(face.points) + up)
        P2 = Polytope.hull(list(face.points) + dn)
        if set(face.points) <= set(P1.points) and set(face.points) <= set(P2.points):
            return P1, P2


def chart_volume_of(P, chart):
    # pulling triangulation, independent of the coning one
    from polychain.polytope import pulling_triangulation
    return sum((chart_volume([P.points[i] for i in s], chart) for s in pulling_triangulation(P.faces())), F(0))


def test_criterion_04_gluing_common_faces():
    rng = random.Random(404)
    for _ in range(50):
        P1, P2 = _face_sharing_pair(rng)
        T1, T2 = triangulate_polytope(P1), triangulate_polytope(P2)
        G = glue_triangulations(T1, T2)
        pieces = [G.simplex_points(s) for s in G.simplices]
        assert check_pairwise(pieces) == []
        # volumes in the ambient coordinates (both polytopes are full-dimensional)
        I = Chart.identity(P1.ambient_dim)
        assert G.total_volume(I) == T1.total_volume(I) + T2.total_volume(I)
        assert T1.total_volume(I) == chart_volume_of(P1, I)


# 5 -----------------------------------------------------------------------------

def test_criterion_05_skeleton_embedding():
    rng = random.Random(505)
    hosts = [fx.unit_square, fx.unit_cube]
    for i in range(30):
        host = hosts[i % 2]()
        d = host.ambient_dim
        k = rng.choice([1, 2])
        while True:
            pts = [tuple(F(rng.randint(1, 15), 16) for _ in range(d)) for _ in range(k + 1)]
            P = Polytope.hull(pts)
            if P.dim == k and len(P.points) == k + 1:
                break
        R = embed(host, [P])
        affected = [t for pl in R.plans for t in pl.affected]
        rep = locality_report(host, R.complex, affected)
        assert rep["stray_refined"] == [] and rep["preserved_violations"] == []
        pieces = contained_simplices(R.complex, P)
        assert pieces
        for _ in range(1000):
            # points of aff(P), inside and outside P
            w = [F(rng.randint(-4, 12), 8) for _ in range(k)]
            w.append(1 - sum(w))
            x = tuple(sum(wi * p[c] for wi, p in zip(w, P.points)) for c in range(d))
            assert point_in_simplex(x, P.points) == in_union(x, R.complex, pieces)


# 6 -----------------------------------------------------------------------------

def test_criterion_06_homology_fixtures():
    with _timed(30):
        for name, make in fx.HOMOLOGY_FIXTURES.items():
            K = make()
            hz = homology(K)
            for p in (None, 2, 3, 5):
                H = hz if p is None else homology(K, p)
                got = [H.group(k) for k in range(K.dim + 1)]
                assert got == fx.oracle_groups(name, p), (name, p)
                if p is not None:
                    assert H.betti == uct_predicted_dims(hz, p), (name, p)


# 7 -----------------------------------------------------------------------------

def _suppress_degree_two(G: SimplicialComplex):
    """Vertex and edge counts of a graph after smoothing degree-2 vertices."""
    deg = {v: 0 for (v,) in G.simplices(0)}
    for a, b in G.simplices(1):
        deg[a] += 1
        deg[b] += 1
    two = sum(1 for v in deg.values() if v == 2)
    return G.count(0) - two, G.count(1) - two


def test_criterion_07_dual_complements():
    # tetrahedron boundary, j = 0: the dual graph is K4
    S2 = fx.tetrahedron_boundary()
    D = full_subcomplex_complement(S2, 0)
    assert D.dim == 1
    assert homology(D).betti == [1, 3]
    assert 2 - 4 == D.euler_characteristic()  # chi(S^2) minus four points
    assert _suppress_degree_two(D) == (4, 6)
    # 7-vertex torus and boundary of the 4-simplex, j = 0, 1
    expected = {
        ("T2", 0): [1, 8],        # torus minus 7 points
        ("T2", 1): [14],          # one point per triangle
        ("S3", 0): [1, 0, 4],     # S^3 minus 5 points
        ("S3", 1): [1, 6],        # Alexander dual of the 1-skeleton (beta_1 = 6)
    }
    cases = {"T2": fx.torus7(), "S3": fx.sphere_boundary(3)}
    for (name, j), betti in expected.items():
        K = cases[name]
        D = full_subcomplex_complement(K, j)
        assert homology(D).betti == betti, (name, j)
        assert D.euler_characteristic() == dual_euler_characteristic(K, j)


# 8 -----------------------------------------------------------------------------

def _flat_suite(rng):
    cases = []
    hosts = [
        (lambda: SimplicialComplex([(0, 1, 2)], coords=[(0, 0), (rq(rng, 1, 4), 0), (rq(rng, -2, 2), rq(rng, 1, 4))]), 1),
        (lambda: grid_square(rng, 1, 1), 1),
        (lambda: coned_polygon(rng, 4), 1),
        (lambda: coned_polygon(rng, 5), 1),
        (lambda: coned_polygon(rng, 6), 1),
        (lambda: grid_square(rng, 2, 2), 1),
        (lambda: SimplicialComplex([(i, i + 1) for i in range(5)],
                                   coords=[(i, rq(rng, 0, 2)) for i in range(6)]), 0),
        (lambda: SimplicialComplex([(0, 1), (1, 2), (1, 3), (3, 4)],
                                   coords=[(0, 0), (1, 0), (2, 1), (1, 2), (2, 3)]), 0),
        (lambda: fx.unit_cube(), 2),
        (lambda: fx.simplex(3), 2),
    ]
    for make, k in hosts:
        for _ in range(4):
            K = make()
            while True:
                T = random_chain(rng, K, k, density=0.6, bound=1)
                if T:
                    break
            cases.append((K, T))
    return cases


def test_criterion_08_flat_norm():
    with _timed(120):
        rng = random.Random(808)
        suite = _flat_suite(rng)
        assert len(suite) == 40
        for K, T in suite:
            k = T.dim
            assert K.count(k) + K.count(k + 1) <= 30
            lp = flat_norm_lp(T, K)
            assert lp.status == LP_EXACT
            assert lp.residual_is_zero(T)
            bound = 3
            assert all(abs(c) <= bound for c in lp.S.terms.values())
            bf = flat_norm_bruteforce(T, K, bound)
            assert bf.residual_is_zero(T)
            assert abs(lp.value - bf.value) <= mpmath.mpf(10) ** -12 * max(1, bf.value)

        # area/perimeter crossover of F(boundary of lambda * unit right triangle)
        base = [(0, 0), (1, 0), (0, 1)]
        analytic = 2 * (2 + math.sqrt(2))  # lambda^2 / 2 = lambda (2 + sqrt 2)
        lam = float(crossover_scale(base))
        assert abs(lam - analytic) <= 0.01 * analytic

        tol = mpmath.mpf(10) ** -12
        hosts = [grid_square(rng, 2, 2), coned_polygon(rng, 6), fx.unit_cube()]
        for i in range(500):
            K = hosts[i % len(hosts)]
            if i % 2 == 0:
                T = random_chain(rng, K, 1, density=0.4, bound=3)
                assert flat_norm_lp(T, K).value <= mass(T) + tol
            else:
                S = random_chain(rng, K, 2, density=0.4, bound=3)
                assert flat_norm_lp(boundary(S), K).value <= mass(S) + tol


# 9 -----------------------------------------------------------------------------

def test_criterion_09_steenrod_algebra():
    red = lambda w: st.adem_reduce(w, 2)
    E = lambda *w: st.SteenrodElement.word(w, 2)
    assert red((1, 1)).is_zero()
    assert red((1, 2)) == E(3)
    assert red((2, 2)) == E(3, 1)
    series = st.admissible_dimension_series(12, 2)
    assert [len(st.admissible_monomials(d, 2)) for d in range(13)] == series
    rng = random.Random(909)
    for i in range(500):
        p = (2, 3, 5)[i % 3]
        w = st.random_word(rng, 40 if p == 2 else 60, p)
        assert st.adem_reduce(w, p, rng=rng) == st.adem_reduce(w, p)


# 10 ----------------------------------------------------------------------------

def test_criterion_10_cochain_operations():
    with _timed(120):
        for name, make in fx.HOMOLOGY_FIXTURES.items():
            K = make()
            H = ModPCohomology(K, 2)
            for n in range(K.dim + 1):
                for c in H.basis(n):
                    assert H.same_class(st.sq_on_cochain(0, c), c), (name, n)
                    if 2 * n <= K.dim:
                        assert H.same_class(st.sq_on_cochain(n, c), cup_product(c, c)), (name, n)

        R = fx.rp2()
        HR = ModPCohomology(R, 2)
        x = HR.basis(1)[0]
        assert HR.same_class(st.sq_on_cochain(1, x), bockstein(x))
        assert not HR.is_coboundary(bockstein(x))

        P = fx.rp2_x_rp2()
        HP = ModPCohomology(P, 2)
        nl = R.nverts
        u = pullback(x, P, [v // nl for v in range(P.nverts)])
        v = pullback(x, P, [v % nl for v in range(P.nverts)])
        pairs = [(u, v), (cup_product(u, u), v), (u, cup_product(v, v)), (u, u),
                 (cup_product(u, u), cup_product(v, v))]
        nonzero = 0
        for a, b in pairs:
            for k in range(a.degree + b.degree + 1):
                if a.degree + b.degree + k > P.dim:
                    continue
                lhs = st.sq_on_cochain(k, cup_product(a, b))
                rhs = None
                for i, j, _ in st.cartan_expand(k, a.degree, b.degree):
                    t = cup_product(st.sq_on_cochain(i, a), st.sq_on_cochain(j, b))
                    rhs = t if rhs is None else rhs + t
                assert HP.same_class(lhs, rhs)
                nonzero += not HP.is_coboundary(lhs)
        assert nonzero >= 5

        L = fx.lens_space_31()
        H3 = ModPCohomology(L, 3)
        for v1 in H3.basis(1):
            assert any(H3.coordinates(bockstein(v1)))

        Tor = fx.torus7()
        for p in (2, 3, 5):
            Hp = ModPCohomology(Tor, p)
            for n in (0, 1):
                for c in Hp.basis(n):
                    assert Hp.is_coboundary(bockstein(c))


# 11 ----------------------------------------------------------------------------

def test_criterion_11_deformation_numerics():
    rng = np.random.default_rng(1111)
    for _ in range(20):
        eta = float(rng.uniform(0.5, 2.0))
        delta_a = float(rng.uniform(0.01, 0.3)) * eta
        mu = float(rng.uniform(0.0, 1.0))
        params = df.ProfileParams(mu, delta_a, eta)
        t = np.linspace(0.0, 1.2 * eta, 10_000)
        psi = df.smooth_profile(params, t)
        slopes = np.diff(psi) / np.diff(t)
        assert slopes.max() <= params.slope_bound + 1e-6

    for m, k, n in [(2, 0, 4), (2, 1, 4), (3, 1, 2)]:
        Z = df.cube_chain(m, n)
        results = [df.mass_contraction_experiment(Z, k, g) for g in (0.5, 0.25, 0.125)]
        for r in results:
            assert r.ratio <= r.bound
        slope = df.fit_exponent(results)
        assert abs(slope - (m - k)) <= 0.05 * (m - k)


# 12 ----------------------------------------------------------------------------

_CUBE = '{"points": [["0","0","0"],["1","0","0"],["0","1","0"],["1","1","0"],' \
        '["0","0","1"],["1","0","1"],["0","1","1"],["1","1","1"]]}'
_SEG = '{"points": [["1/4","0"],["3/4","0"]]}'
_CHAIN = '{"dim": 1, "terms": [{"simplex": [0,1], "coeff": 1}, {"simplex": [1,2], "coeff": 1},' \
         ' {"simplex": [0,2], "coeff": -1}]}'

SUITE = [
    "fixture rp2 -o rp2.json",
    "fixture square -o sq.json",
    "fixture simplex2 -o tri.json",
    "fixture lens31 -o l31.json",
    "tri cube.json -o tri_cube.json",
    "refine sq.json seg.json -o refined.json",
    "homology rp2.json --coeff z2 -o h2.json",
    "homology l31.json --coeff z -o hz.json",
    "flatnorm tri.json chain.json -o flat.json --csv flat.csv",
    "steenrod reduce --p 2 --word 2,2 -o adem2.json",
    "steenrod reduce --p 3 --word 1,1 -o adem3.json",
    "steenrod apply rp2.json --i 1 --degree 1 -o sq1.json",
    "bockstein l31.json --p 3 --degree 1 -o beta.json",
    "profile psi --mu 0.5 --delta-a 0.1 --eta 1 -o psi.json --csv psi.csv",
    "profile phi --mu 0.25 --delta-a 0.05 --eta 1 -o phi.json --csv phi.csv",
    "experiment squash --m 2 --k 0 -o squash.json --csv squash.csv",
    "experiment audit sq.json --j 1 --samples 400 -o audit.json",
    "subdivide rp2.json -o bs.json",
    "dual rp2.json --j 0 -o dual.json",
    "validate rp2.json -o valid.json",
]


def _run_suite(workdir: Path, seed: int) -> dict:
    workdir.mkdir()
    (workdir / "cube.json").write_text(_CUBE)
    (workdir / "seg.json").write_text(_SEG)
    (workdir / "chain.json").write_text(_CHAIN)
    env = dict(os.environ, PYTHONHASHSEED="random")
    for cmd in SUITE:
        proc = subprocess.run([sys.executable, "-m", "polychain", "--seed", str(seed), *cmd.split()],
                              cwd=workdir, env=env, capture_output=True)
        assert proc.returncode == 0, (cmd, proc.stderr.decode())
    return {p.name: p.read_bytes() for p in sorted(workdir.iterdir())}


def test_criterion_12_cli_determinism(tmp_path):
    runs = [_run_suite(tmp_path / f"run{i}", seed=7) for i in range(3)]
    assert len(runs[0]) >= 2 * len(SUITE)  # artifact plus manifest per command
    assert runs[0] == runs[1] == runs[2]


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
