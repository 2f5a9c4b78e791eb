import random
from fractions import Fraction as F

import mpmath
import pytest

from helpers import coned_polygon, random_chain
from polychain import fixtures as fx
from polychain import flatnorm as fn
from polychain.chains import Chain, boundary, mass
from polychain.flatnorm import (BRUTE_FORCE, LP_EXACT, boundary_triangle_complex, crossover_scale,
                                flat_norm_bruteforce, flat_norm_lp)
from polychain.polytope import GuardExceeded


def test_zero_chain():
    K = fx.triangle()
    r = flat_norm_lp(Chain.zero(K, 1), K)
    assert r.value == 0 and r.status == LP_EXACT


def test_small_triangle_prefers_area():
    K, T = boundary_triangle_complex([(0, 0), (1, 0), (0, 1)])
    r = flat_norm_lp(T, K)
    assert r.status == LP_EXACT
    assert float(r.value) == 0.5
    assert r.residual_is_zero(T)
    assert not r.R


def test_large_triangle_prefers_perimeter():
    K, T = boundary_triangle_complex([(0, 0), (10, 0), (0, 10)])
    r = flat_norm_lp(T, K)
    assert not r.S
    with mpmath.workprec(128):
        assert abs(r.value - mass(T)) < mpmath.mpf(2) ** -100


def test_flat_norm_bounded_by_mass():
    rng = random.Random(11)
    K = coned_polygon(rng, 5)
    for _ in range(5):
        T = random_chain(rng, K, 1, density=0.6, bound=2)
        r = flat_norm_lp(T, K)
        assert r.value <= mass(T) + mpmath.mpf(2) ** -60
        if r.status == LP_EXACT:
            assert r.residual_is_zero(T)


@pytest.mark.parametrize("seed", range(6))
def test_lp_matches_bruteforce(seed):
    rng = random.Random(seed)
    K = coned_polygon(rng, rng.choice([3, 4]))
    T = random_chain(rng, K, 1, density=0.7, bound=1)
    if not T:
        T = boundary(Chain.fundamental(K))
    lp = flat_norm_lp(T, K)
    bf = flat_norm_bruteforce(T, K, 2)
    assert bf.status == BRUTE_FORCE
    assert bf.residual_is_zero(T)
    assert abs(float(lp.value) - float(bf.value)) < 1e-9


def test_crossover_matches_closed_form():
    lam = crossover_scale([(0, 0), (1, 0), (0, 1)])
    # area lam^2/2 equals perimeter lam(2 + sqrt 2)
    assert abs(float(lam) - 2 * (2 + 2 ** 0.5)) < 1e-6


def test_bruteforce_guard(monkeypatch):
    K = fx.unit_square()
    T = boundary(Chain.fundamental(K))
    monkeypatch.setattr(fn, "BRUTE_MAX_CANDIDATES", 10)
    with pytest.raises(GuardExceeded):
        flat_norm_bruteforce(T, K, 3)
    with pytest.raises(ValueError):
        flat_norm_bruteforce(3 * T, K, 1)
