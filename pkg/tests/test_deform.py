import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hs

from polychain import deform as df
from polychain import fixtures as fx
from polychain.chains import boundary, mass


def test_squared_distance_to_simplex():
    tri = [(0, 0), (2, 0), (0, 2)]
    assert df.squared_distance_to_simplex((1, F(1, 2)), tri) == 0
    assert df.squared_distance_to_simplex((3, 0), tri) == 1
    assert df.squared_distance_to_simplex((2, 2), tri) == 2
    assert df.squared_distance_to_simplex((-1, -1), tri) == 2
    assert df.squared_distance_to_simplex((0, 0, 1), [(0, 0, 0), (1, 0, 0)]) == 1


# --- graded neighbourhoods ----------------------------------------------------

def test_graded_radii_and_validation():
    N = df.GradedNeighborhood(fx.unit_square(), 1, F(1, 8), 4)
    assert N.radii == [F(1, 8), F(1, 32)]
    with pytest.raises(ValueError):
        df.GradedNeighborhood(fx.unit_square(), 1, 0)
    with pytest.raises(ValueError):
        df.GradedNeighborhood(fx.unit_square(), 3, F(1, 8))
    assert df.default_delta(fx.unit_square()) == F(1, 8)


def test_v_delta_membership():
    K = fx.unit_square()
    N = df.GradedNeighborhood(K, 1, F(1, 8), 4)
    assert df.v_delta_contains(N, (F(1, 10), F(1, 20)))         # near a vertex
    assert df.v_delta_contains(N, (F(1, 2), F(1, 64)))          # near an edge
    assert not df.v_delta_contains(N, (F(1, 2), F(1, 16)))      # 2x the edge radius
    assert not df.v_delta_contains(N, (F(1, 2), F(1, 4)))
    # a point at distance 2 delta from the skeleton is excluded
    N0 = df.GradedNeighborhood(K, 0, F(1, 8), 4)
    assert not df.v_delta_contains(N0, (F(1, 4), 0))


def test_v_delta_grows_with_delta():
    K = fx.unit_square()
    rng = np.random.default_rng(5)
    small = df.GradedNeighborhood(K, 1, F(1, 16), 4)
    big = df.GradedNeighborhood(K, 1, F(1, 8), 4)
    pts = [(F(int(a), 256), F(int(b), 256)) for a, b in rng.integers(0, 257, size=(2000, 2))]
    for p in pts:
        if df.v_delta_contains(small, p):
            assert df.v_delta_contains(big, p)


def test_audit_separates_gradings():
    K = fx.unit_square()
    flat = df.GradedNeighborhood(K, 1, F(1, 8), 1)
    graded = df.GradedNeighborhood(K, 1, F(1, 8), 4)
    assert not df.boundary_regularity_audit(flat, adversarial=True).passed
    assert df.boundary_regularity_audit(graded, adversarial=True).passed
    rep = df.boundary_regularity_audit(graded, samples=1000, rng=np.random.default_rng(3))
    assert rep.passed and rep.samples > 500
    assert rep.to_json()["max_touching"]["1"] <= 1


# --- profiles -----------------------------------------------------------------

P = df.ProfileParams(0.5, 0.1, 1.0)


def test_phi_examples():
    assert df.phi_profile(P, 0.1) == pytest.approx(0.05)
    assert df.phi_profile(P, 0.2) == pytest.approx(0.1)
    assert df.phi_profile(P, 0.9) == pytest.approx(0.9)
    assert df.phi_profile(P, 3.0) == 3.0
    assert P.middle_slope == pytest.approx(0.8 / 0.7)
    for b in (0.2, 0.9):
        lo, hi = df.phi_profile(P, [b - 1e-12, b + 1e-12])
        assert abs(hi - lo) < 1e-10


def test_profile_parameter_checks():
    with pytest.raises(ValueError):
        df.ProfileParams(1.5, 0.1, 1.0)
    with pytest.raises(ValueError):
        df.ProfileParams(0.5, 0.4, 1.0)
    with pytest.raises(ValueError):
        df.phi_profile(P, -1.0)


@given(hs.floats(0.0, 1.0), hs.floats(0.01, 0.3), hs.floats(0.5, 2.0), hs.floats(0.0, 1.3))
@settings(max_examples=40)
def test_psi_matches_quadrature(mu, frac, eta, s):
    params = df.ProfileParams(mu, frac * eta, eta)
    t = s * eta
    assert abs(df.smooth_profile(params, t) - df.smooth_profile_quad(params, t)) < 1e-12


def test_psi_derivative_matches_differences():
    t = np.linspace(0.01, 1.1, 500)
    h = 1e-6
    fd = (df.smooth_profile(P, t + h) - df.smooth_profile(P, t - h)) / (2 * h)
    assert np.max(np.abs(fd - df.smooth_profile(P, t, derivative=True))) < 1e-6


def test_psi_linear_pieces():
    t = np.linspace(0, P.delta_a, 50)
    assert np.array_equal(df.smooth_profile(P, t), P.mu * t)
    t = np.linspace(P.eta - P.delta_a / 2, 3, 50)
    assert np.array_equal(df.smooth_profile(P, t), t)


def test_radial_squash():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(200, 3))
    ident = df.ProfileParams(1.0, 0.1, 1.0)
    assert np.allclose(df.radial_squash(ident, x), x, atol=1e-14)
    small = x / np.linalg.norm(x, axis=1)[:, None] * 0.05
    assert np.allclose(df.radial_squash(P, small), 0.5 * small)
    far = x / np.linalg.norm(x, axis=1)[:, None] * 1.5
    assert np.allclose(df.radial_squash(P, far), far)
    assert np.allclose(df.radial_squash(P, np.zeros((1, 3))), 0)


def test_radial_jacobian_and_lipschitz():
    rng = np.random.default_rng(1)
    x = rng.uniform(-1, 1, size=(50, 2))
    h = 1e-6
    J = df.radial_squash_jacobian(P, x)
    for a in range(2):
        e = np.zeros(2)
        e[a] = h
        col = (df.radial_squash(P, x + e) - df.radial_squash(P, x - e)) / (2 * h)
        assert np.max(np.abs(col - J[:, :, a])) < 1e-6
    L = df.sampled_lipschitz(lambda y: df.radial_squash(P, y), 2, rng, n=5000, scale=1.2)
    assert L <= P.slope_bound + 1e-6


# --- distance function ------------------------------------------------------------

@pytest.mark.parametrize("m", [2, 3])
def test_simplex_distance_function(m):
    f = df.SimplexDistFunction(m)
    rng = np.random.default_rng(7)
    bary = np.full((1, m), 1 / (m + 1))
    assert f(bary)[0] > 0
    X = df.sample_simplex(m, 3000, rng)
    vals = f(X)
    assert np.all(vals > 0)
    near = f.in_facet_neighborhood(X)
    assert near.sum() > 50
    assert np.max(np.abs(vals[near] - df.dist_to_boundary(X[near]))) < 1e-12
    # sampled Lipschitz constant; the recorded value is 1 up to sampling
    h = rng.normal(size=X.shape)
    h *= 1e-4 / np.linalg.norm(h, axis=1)[:, None]
    ok = df.dist_to_boundary(X + h) > 0
    L = np.max(np.abs(f(X[ok]) - f(X[ok] + h[ok])) / 1e-4)
    assert L < 1.05


def test_simplex_distance_function_domain():
    f = df.SimplexDistFunction(2)
    assert f(np.array([[0.5, 0.0]]))[0] == 0
    with pytest.raises(ValueError):
        f(np.array([[0.9, 0.9]]))
    with pytest.raises(ValueError):
        df.SimplexDistFunction(1)


# --- mass contraction ------------------------------------------------------------

def test_proof_constant():
    assert df.proof_constant(2, 0, 2) == pytest.approx(2.0)
    assert df.proof_constant(3, 1, 3) == pytest.approx(2 * math.sqrt(3))


def test_identity_squash_keeps_mass():
    Z = df.cube_chain(2, 4)
    r = df.mass_contraction_experiment(Z, 0, 1.0)
    assert r.ratio == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("m,k", [(2, 0), (2, 1)])
def test_half_squash(m, k):
    Z = df.cube_chain(m, 4)
    r = df.mass_contraction_experiment(Z, k, 0.5)
    assert abs(r.ratio - 0.5 ** (m - k)) <= 0.1 * 0.5 ** (m - k)
    assert r.ratio <= r.bound


def test_cube_chain_orientation():
    Z = df.cube_chain(2, 2)
    assert len(Z) == 8
    assert float(mass(boundary(Z))) == pytest.approx(8.0)


def test_experiment_needs_the_ball():
    Z = df.cube_chain(2, 2, half=F(1))
    with pytest.raises(ValueError):
        df.mass_contraction_experiment(Z, 2, 0.5)
