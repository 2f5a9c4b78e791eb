import itertools
import math
import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as hs
from scipy.optimize import linprog

from polychain import exact, smith
from polychain.lp import INFEASIBLE, OPTIMAL, UNBOUNDED, linprog_exact

small_int = hs.integers(-5, 5)


def matrices(max_rows=5, max_cols=5):
    return hs.integers(1, max_rows).flatmap(
        lambda m: hs.integers(1, max_cols).flatmap(
            lambda n: hs.lists(hs.lists(small_int, min_size=n, max_size=n), min_size=m, max_size=m)))


def leibniz_det(A):
    n = len(A)
    total = 0
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        total += (-1) ** inv * math.prod(A[i][perm[i]] for i in range(n))
    return total


@given(hs.integers(1, 4).flatmap(lambda n: hs.lists(hs.lists(small_int, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_det_matches_leibniz(A):
    assert exact.det(A) == leibniz_det(A)


@given(matrices())
def test_nullspace_and_rank(A):
    n = len(A[0])
    N = exact.nullspace(A, n)
    assert len(N) == n - exact.rank(A)
    for v in N:
        assert all(sum(F(a) * x for a, x in zip(row, v)) == 0 for row in A)


def test_solve_and_to_q():
    A = [[2, 1], [1, 3]]
    x = exact.solve(A, [3, 5])
    assert tuple(x) == (F(4, 5), F(7, 5))
    assert exact.solve([[1, 1], [1, 1]], [1, 2]) is None
    assert exact.to_q("3/6") == F(1, 2)
    assert exact.q_str(F(-2, 4)) == "-1/2"
    with pytest.raises(TypeError):
        exact.to_q(0.5)


def test_lp_against_scipy():
    rng = random.Random(11)
    for _ in range(60):
        m, n = rng.randint(1, 4), rng.randint(2, 7)
        A = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(m)]
        x0 = [rng.randint(0, 3) for _ in range(n)]
        b = [sum(a * x for a, x in zip(row, x0)) for row in A]
        c = [rng.randint(0, 5) for _ in range(n)]
        ours = linprog_exact(c, A, b)
        ref = linprog(c, A_eq=A, b_eq=b, bounds=[(0, None)] * n, method="highs")
        assert ours.status == OPTIMAL and ref.status == 0
        assert abs(float(ours.value) - ref.fun) < 1e-9
        assert [sum(F(a) * x for a, x in zip(row, ours.x)) for row in A] == b


def test_lp_infeasible_and_unbounded():
    assert linprog_exact([1, 1], [[1, 1]], [-1]).status == INFEASIBLE
    assert linprog_exact([-1, 0], [[1, -1]], [0]).status == UNBOUNDED


def matmul(A, B):
    return [[sum(a * b for a, b in zip(r, c)) for c in zip(*B)] for r in A]


@given(matrices(6, 6), hs.sampled_from([None, 2, 3, 5]))
def test_snf_transforms(A, p):
    S = smith.smith_normal_form(A, p)
    red = (lambda M: [[x % p for x in r] for r in M]) if p else (lambda M: M)
    assert red(matmul(matmul(S.U, A), S.V)) == S.D
    m, n = len(A), len(A[0])
    assert red(matmul(S.U, S.Uinv)) == [[int(i == j) for j in range(m)] for i in range(m)]
    assert red(matmul(S.V, S.Vinv)) == [[int(i == j) for j in range(n)] for i in range(n)]
    assert all(S.D[i][j] == 0 for i in range(m) for j in range(n) if i != j)
    d = S.diagonal
    if p is None:
        assert all(x > 0 for x in d)
        assert all(d[i + 1] % d[i] == 0 for i in range(len(d) - 1))


def determinantal_divisors(A):
    m, n = len(A), len(A[0])
    out = []
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(n), k):
                g = math.gcd(g, leibniz_det([[A[i][j] for j in cols] for i in rows]))
        if g == 0:
            break
        out.append(g)
    return out


@given(matrices(4, 4))
def test_invariant_factors_match_minors(A):
    dk = determinantal_divisors(A)
    expected = [dk[0]] + [dk[i] // dk[i - 1] for i in range(1, len(dk))] if dk else []
    assert smith.invariant_factors(A) == expected
    assert smith.smith_normal_form(A).diagonal == expected


def rank_mod_p(A, p):
    M = [[x % p for x in r] for r in A]
    r = 0
    for c in range(len(M[0])):
        piv = next((i for i in range(r, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = pow(M[r][c], -1, p)
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c] * inv
                M[i] = [(a - f * b) % p for a, b in zip(M[i], M[r])]
        r += 1
    return r


@given(matrices(7, 7), hs.sampled_from([2, 3, 5]))
def test_rank_mod_p(A, p):
    assert smith.rank(A, p) == rank_mod_p(A, p)


@given(matrices(6, 6), hs.sampled_from([2, 3]))
def test_kernel_mod_p(A, p):
    n = len(A[0])
    rows = {i: {j: v % p for j, v in enumerate(r) if v % p} for i, r in enumerate(A)}
    K = smith.kernel_mod_p(rows, n, p)
    assert len(K) == n - rank_mod_p(A, p)
    for v in K:
        for r in A:
            assert sum(r[j] * x for j, x in v.items()) % p == 0


def test_echelon_membership():
    E = smith.Echelon(3)
    E.add({0: 1, 1: 1})
    E.add({1: 1, 2: 2})
    assert E.contains({0: 1, 1: 2, 2: 2})
    assert not E.contains({2: 1})
