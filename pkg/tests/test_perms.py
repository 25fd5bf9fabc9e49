from fractions import Fraction
from itertools import permutations
from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cardefinetti.car import build_context, parity
from cardefinetti.exceptions import CapacityError, DimensionError, DomainError
from cardefinetti.perms import (FockUnitary, Permutation, alpha, enumerate_group,
                                exhaustive_group_average, intersecting_fraction,
                                intersecting_fraction_bruteforce, mixing_permutation,
                                random_permutation, sampled_group_average, second_quantize,
                                symmetrize_operator)
from conftest import random_matrix


def perms_of(n):
    return st.permutations(list(range(1, n + 1))).map(lambda p: Permutation(tuple(p)))


def test_permutation_basics():
    g = Permutation.from_cycle(3, 1, 2, 3)
    assert g.image == (2, 3, 1)
    assert (g @ g.inverse()).is_identity()
    assert (g @ g @ g).is_identity()
    assert Permutation.transposition(4, 2, 4).image == (1, 4, 3, 2)
    with pytest.raises(DomainError):
        Permutation((1, 1, 2))
    with pytest.raises(DimensionError):
        g @ Permutation.identity(4)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_second_quantization_is_a_representation(n):
    group = list(enumerate_group(n))
    for g in group:
        for h in group:
            lhs, rhs = second_quantize(g) @ second_quantize(h), second_quantize(g @ h)
            assert np.array_equal(lhs.target, rhs.target)
            assert np.array_equal(lhs.sign, rhs.sign)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_second_quantization_moves_generators(n):
    ctx = build_context(n)
    for g in enumerate_group(n):
        G = second_quantize(g).matrix()
        assert np.allclose(G @ G.conj().T, np.eye(ctx.dim))
        for j in range(1, n + 1):
            assert np.array_equal(G @ ctx.a(j) @ G.conj().T, ctx.a(g(j)))
            assert np.array_equal(alpha(g, ctx.a(j)), ctx.a(g.inverse()(j)))


def test_fock_unitary_helpers(rng):
    g = Permutation.from_cycle(3, 1, 3)
    U = second_quantize(g)
    A = random_matrix(rng, 8)
    v = rng.standard_normal(8)
    M = U.matrix()
    assert np.allclose(U.conjugate(A), M @ A @ M.conj().T)
    assert np.allclose(U.apply(v), M @ v)
    assert np.array_equal(U.adjoint().matrix(), M.conj().T)
    assert isinstance(U @ U, FockUnitary)


def test_transposition_sign_on_doubly_occupied_pair():
    # swapping two occupied modes reorders a^+_1 a^+_2 and flips the sign
    M = second_quantize(Permutation.transposition(2, 1, 2)).matrix()
    assert M[3, 3] == -1
    assert M[1, 2] == 1 and M[0, 0] == 1


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_symmetrization_matches_enumeration(n, rng):
    ctx = build_context(n)
    A = random_matrix(rng, ctx.dim)
    assert np.allclose(symmetrize_operator(ctx, A), exhaustive_group_average(ctx, A), atol=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_partial_symmetrization(k, rng):
    ctx = build_context(4)
    A = random_matrix(rng, ctx.dim)
    assert np.allclose(symmetrize_operator(ctx, A, k), exhaustive_group_average(ctx, A, k))


def test_symmetrization_laws(rng):
    ctx = build_context(4)
    A = random_matrix(rng, ctx.dim)
    S = symmetrize_operator(ctx, A)
    assert np.allclose(symmetrize_operator(ctx, S), S)
    assert np.allclose(parity(ctx, S), symmetrize_operator(ctx, parity(ctx, A)))
    for g in enumerate_group(4):
        assert np.allclose(alpha(g, S), S)


def test_group_average_caps():
    ctx = build_context(10)
    with pytest.raises(CapacityError):
        exhaustive_group_average(ctx, ctx.a(1))
    with pytest.raises(DomainError):
        symmetrize_operator(build_context(3), np.eye(8), k=4)


def test_sampled_average_is_close_to_exact():
    n = 4
    exact = np.mean([float(g(1) == 1) for g in enumerate_group(n)])
    mean, se = sampled_group_average(n, lambda g: float(g(1) == 1), n_samples=4000, seed=1)
    assert abs(mean - exact) < 5 * se


@settings(max_examples=40, deadline=None)
@given(perms_of(4), perms_of(4))
def test_alpha_reverses_products(g, h):
    # alpha_g alpha_h = alpha_{h g} under the convention alpha_g = Ad Gamma(g^-1)
    ctx = build_context(4)
    A = ctx.a(1) @ ctx.adag(3) + ctx.number(2)
    assert np.allclose(alpha(g, alpha(h, A)), alpha(h @ g, A))


def test_mixing_permutation():
    assert mixing_permutation(1, 3).image == (2, 1, 3)
    assert mixing_permutation(2, 5).image == (3, 4, 1, 2, 5)
    g = mixing_permutation(3, 8)
    assert (g @ g).is_identity()
    with pytest.raises(CapacityError):
        mixing_permutation(3, 7)
    with pytest.raises(DomainError):
        mixing_permutation(0, 4)


def _brute(m, k, N):
    first = set(range(1, m + 1))
    perms = list(permutations(range(1, N + 1)))
    return Fraction(sum(1 for p in perms if first & set(p[:k])), len(perms))


@pytest.mark.parametrize("N", range(2, 8))
def test_counting_fraction_exact(N):
    for m in range(1, N):
        for k in range(1, N - m + 1):
            exact, est = intersecting_fraction(m, k, N)
            assert exact == pytest.approx(float(_brute(m, k, N)), abs=1e-15)
            assert intersecting_fraction_bruteforce(m, k, N) == _brute(m, k, N)
            assert est == m * k / N


def test_counting_fraction_known_values():
    assert intersecting_fraction_bruteforce(2, 2, 7) == Fraction(11, 21)
    exact, est = intersecting_fraction(2, 2, 20)
    assert exact == pytest.approx(0.19473684210526315, abs=1e-15)
    assert abs(exact - est) <= 6e-3


def test_counting_fraction_large_n_branch_is_continuous():
    # the log-gamma branch must agree with exact rationals
    for m, k in [(1, 1), (2, 3), (4, 4)]:
        lg, _ = intersecting_fraction(m, k, 21)
        exact = 1 - Fraction(factorial(21 - m) * factorial(21 - k),
                             factorial(21 - m - k) * factorial(21))
        assert lg == pytest.approx(float(exact), rel=1e-12)


@pytest.mark.parametrize("args", [(3, 3, 5), (0, 1, 4), (4, 1, 4)])
def test_counting_fraction_domain(args):
    with pytest.raises(DomainError):
        intersecting_fraction(*args)


def test_bruteforce_cap():
    with pytest.raises(CapacityError):
        intersecting_fraction_bruteforce(1, 1, 9)


def test_random_permutation_is_seeded():
    a = random_permutation(6, np.random.default_rng(3))
    b = random_permutation(6, np.random.default_rng(3))
    assert a == b
