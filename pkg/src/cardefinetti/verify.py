"""Seeded invariant suite behind ``cardefinetti verify``."""
import math

import numpy as np

from .car import (all_words, anticommutator, build_context, commutator, gamma_iso,
                  matrix_unit, normalized_trace, parity, random_local_operator)
from .definetti import classify_type, eigenvalue_ratio_spectrum, recover_measure
from .gns import (DENSE_GNS_CAP, build_gns, ep_odd_compression, fixed_space_basis,
                  nested_ergodic_check)
from .perms import (Permutation, alpha, enumerate_group, exhaustive_group_average,
                    intersecting_fraction, intersecting_fraction_bruteforce,
                    random_permutation, second_quantize,
                    symmetrize_operator)
from .states import (anticommutator_average, evaluate, is_even, is_symmetric,
                     occupation_moments, product_state, strong_clustering_check,
                     weak_clustering_average)
from .validation import EXHAUSTIVE_CAP, check_mode_count, check_random_state


def _check(name, deviation, tol, notice=None):
    deviation = float(deviation)
    return {"check": name, "deviation": deviation, "tolerance": tol,
            "passed": bool(deviation <= tol), "notice": notice}


def _skip(name, notice):
    return {"check": name, "deviation": None, "tolerance": None,
            "passed": True, "notice": notice}


def _random_op(ctx, rng):
    return rng.standard_normal((ctx.dim, ctx.dim)) + 1j * rng.standard_normal((ctx.dim, ctx.dim))


def car_relations(ctx):
    dev = 0.0
    I = ctx.identity
    for j in range(1, ctx.n + 1):
        for k in range(1, ctx.n + 1):
            dev = max(dev, np.abs(anticommutator(ctx.adag(j), ctx.a(k)) - (j == k) * I).max(),
                      np.abs(anticommutator(ctx.a(j), ctx.a(k))).max())
    return _check("car_relations", dev, 0.0)


def parity_automorphism(ctx, rng):
    dev = 0.0
    for _ in range(5):
        A, B = _random_op(ctx, rng), _random_op(ctx, rng)
        dev = max(dev,
                  np.abs(parity(ctx, A @ B) - parity(ctx, A) @ parity(ctx, B)).max(),
                  np.abs(parity(ctx, A.conj().T) - parity(ctx, A).conj().T).max(),
                  np.abs(parity(ctx, parity(ctx, A)) - A).max())
    for j in range(1, ctx.n + 1):
        dev = max(dev, np.abs(parity(ctx, ctx.a(j)) + ctx.a(j)).max())
    return _check("parity_automorphism", dev, 1e-12)


def matrix_unit_identities(ctx):
    dev = 0.0
    units = {(j, k, l): matrix_unit(ctx, j, k, l)
             for j in range(1, ctx.n + 1) for k in (1, 2) for l in (1, 2)}
    for j in range(1, ctx.n + 1):
        dev = max(dev, np.abs(units[j, 1, 1] + units[j, 2, 2] - ctx.identity).max())
        for k, l, p, q in np.ndindex(2, 2, 2, 2):
            lhs = units[j, k + 1, l + 1] @ units[j, p + 1, q + 1]
            rhs = units[j, k + 1, q + 1] if l == p else 0
            dev = max(dev, np.abs(lhs - rhs).max())
    for i in range(1, ctx.n + 1):
        for j in range(i + 1, ctx.n + 1):
            for k, l, p, q in np.ndindex(2, 2, 2, 2):
                dev = max(dev, np.abs(commutator(units[i, k + 1, l + 1],
                                                 units[j, p + 1, q + 1])).max())
    return _check("matrix_unit_identities", dev, 0.0)


def gamma_exhaustive(n):
    ctx = build_context(min(n, 4))
    count = 0
    for word in all_words(ctx.n):
        gamma_iso(ctx, word)
        count += 1
    notice = None if n <= 4 else f"exhaustive check run on {ctx.n} modes"
    return _check("gamma_iso_exhaustive", 0.0, 0.0,
                  notice if notice else f"{count} words")


def trace_uniqueness(ctx, rng):
    A, B = _random_op(ctx, rng), _random_op(ctx, rng)
    Q, _ = np.linalg.qr(_random_op(ctx, rng))
    dev = max(abs(normalized_trace(ctx, A @ B) - normalized_trace(ctx, B @ A)),
              abs(normalized_trace(ctx, Q @ A @ Q.conj().T) - normalized_trace(ctx, A)),
              abs(normalized_trace(ctx, ctx.identity) - 1))
    return _check("tracial_state", dev, 1e-10)


def representation_laws(ctx, rng):
    n = ctx.n
    if n <= 4:
        group = list(enumerate_group(n))
        pairs = [(g, h) for g in group for h in group]
    else:
        group = [random_permutation(n, rng) for _ in range(20)]
        pairs = list(zip(group, group[::-1]))
    dev = 0.0
    for g, h in pairs:
        lhs = second_quantize(g) @ second_quantize(h)
        rhs = second_quantize(g @ h)
        dev = max(dev, float(np.any(lhs.target != rhs.target) or np.any(lhs.sign != rhs.sign)))
    for g in group:
        for j in range(1, n + 1):
            dev = max(dev, np.abs(alpha(g, ctx.a(j)) - ctx.a(g.inverse()(j))).max())
        dev = max(dev, np.abs(second_quantize(g).adjoint().matrix()
                              - second_quantize(g.inverse()).matrix()).max())
    return _check("permutation_representation", dev, 0.0,
                  "exhaustive" if n <= 4 else "20 sampled pairs")


def symmetrization_laws(ctx, rng):
    A = _random_op(ctx, rng)
    S = symmetrize_operator(ctx, A)
    dev = max(np.abs(symmetrize_operator(ctx, S) - S).max(),
              np.abs(parity(ctx, S) - symmetrize_operator(ctx, parity(ctx, A))).max())
    for i in range(1, ctx.n):
        t = Permutation.transposition(ctx.n, i, i + 1)
        dev = max(dev, np.abs(alpha(t, S) - S).max())
    if ctx.n <= 6:
        dev = max(dev, np.abs(exhaustive_group_average(ctx, A) - S).max())
    return _check("symmetrization", dev, 1e-10)


def product_state_laws(ctx, rng):
    dev = 0.0
    for mu in np.linspace(0, 1, 21):
        phi = product_state(mu, ctx.n)
        dev = max(dev, 0.0 if is_symmetric(ctx, phi) and is_even(ctx, phi) else 1.0)
    phi = product_state(0.3, ctx.n)
    if ctx.n >= 2:
        split = ctx.n // 2
        A = random_local_operator(ctx, range(1, split + 1), rng)
        B = random_local_operator(ctx, range(split + 1, ctx.n + 1), rng)
        dev = max(dev, abs(evaluate(phi, A @ B) - evaluate(phi, A) * evaluate(phi, B)))
    mom = occupation_moments(ctx, phi, ctx.n)
    dev = max(dev, np.abs(mom - 0.3 ** np.arange(ctx.n + 1)).max())
    return _check("product_states", dev, 1e-10)


def counting_fraction(n):
    N = max(n, 2)
    dev = 0.0
    for m in range(1, N):
        for k in range(1, N - m + 1):
            exact, _ = intersecting_fraction(m, k, N)
            dev = max(dev, abs(exact - float(intersecting_fraction_bruteforce(m, k, N))))
    return _check("counting_fraction", dev, 1e-15, f"S_{N} enumerated")


def clustering_rates(ctx):
    n, mu = ctx.n, 0.3
    phi = product_state(mu, n)
    e11 = matrix_unit(ctx, 1, 1, 1)
    dev = abs(anticommutator_average(ctx, phi, ctx.a(1)) - 1 / n)
    dev = max(dev, abs(weak_clustering_average(ctx, phi, e11, e11)
                       - (mu ** 2 + mu * (1 - mu) / n)))
    if n >= 2:
        for m in range(1, int(math.log2(n)) + 1):
            dev = max(dev, abs(strong_clustering_check(ctx, phi, e11, e11, m)))
    return _check("clustering_rates", dev, 1e-12)


def gns_checks(ctx, rng):
    out = []
    mu = 0.3
    phi = product_state(mu, ctx.n)
    if (1 << ctx.n) ** 2 > DENSE_GNS_CAP:
        phi = product_state(0.0, ctx.n)
        notice = "pure product state used to keep the GNS space small"
    else:
        notice = None
    gns = build_gns(ctx, phi)
    Omega = gns.cyclic_vector
    dev = 0.0
    for _ in range(10):
        A, B = _random_op(ctx, rng), _random_op(ctx, rng)
        dev = max(dev, abs(gns.inner(gns.apply_rep(A, Omega), Omega) - evaluate(phi, A)))
        xi = rng.standard_normal(gns.dim) + 1j * rng.standard_normal(gns.dim)
        dev = max(dev, np.abs(gns.apply_rep(A @ B, xi)
                              - gns.apply_rep(A, gns.apply_rep(B, xi))).max())
        for i in range(1, ctx.n):
            t = Permutation.transposition(ctx.n, i, i + 1)
            lhs = gns.apply_unitary(t, gns.apply_rep(A, gns.apply_unitary(t, xi, inverse=True)))
            dev = max(dev, np.abs(lhs - gns.apply_rep(alpha(t, A), xi)).max(),
                      np.abs(gns.apply_unitary(t, Omega) - Omega).max())
    out.append(_check("gns_identities", dev, 1e-10, notice))
    if ctx.n <= EXHAUSTIVE_CAP and gns.dim <= DENSE_GNS_CAP:
        rep = nested_ergodic_check(gns)
        dev = max(rep["fixed_space_deviation"], rep["idempotency_deviation"],
                  -rep["loewner_min_eigenvalue"], 0.0)
        out.append(_check("nested_ergodic_projections", dev, 1e-10, notice))
    else:
        out.append(_skip("nested_ergodic_projections", "GNS space too large for dense check"))
    val = ep_odd_compression(gns, ctx.a(1), fixed_space_basis(gns))
    out.append(_check("odd_compression_bound", max(0.0, val - math.sqrt(1 / ctx.n)), 1e-12))
    return out


def definetti_checks(ctx):
    moments = occupation_moments(ctx, product_state(0.3, ctx.n), ctx.n)
    measure = recover_measure(moments)
    dev = max(np.abs(measure.moments(ctx.n) - moments).max(), abs(measure.weights.sum() - 1))
    # one moment does not pin down the measure
    if ctx.n >= 2:
        dev = max(dev, abs(measure.mus[0] - 0.3) if len(measure.atoms) == 1 else 1.0)
    table = {0.0: ("I_infinity", None), 0.25: ("III_lambda", 1 / 3), 0.5: ("II_1", None),
             0.75: ("III_lambda", 1 / 3), 1.0: ("I_infinity", None)}
    for mu, (tag, lam) in table.items():
        ft = classify_type(mu)
        dev = max(dev, float(ft.tag != tag),
                  0.0 if lam is None else abs(ft.lam - lam))
    _, ratios = eigenvalue_ratio_spectrum(0.25, ctx.n)
    if len(ratios):
        dev = max(dev, np.abs(ratios - 1 / 3).max())
    return _check("definetti_and_factor_types", dev, 1e-9)


def run_suite(n, seed=0):
    """Run every check for ``n`` modes; returns a JSON-serializable report."""
    n = check_mode_count(n, cap=EXHAUSTIVE_CAP)
    rng = check_random_state(seed)
    ctx = build_context(n)
    checks = [car_relations(ctx), parity_automorphism(ctx, rng),
              matrix_unit_identities(ctx), gamma_exhaustive(n),
              trace_uniqueness(ctx, rng)]
    if n == 1:
        notice = "trivial permutation group for n = 1"
        for name in ("permutation_representation", "symmetrization", "counting_fraction",
                     "clustering_rates", "gns_identities", "nested_ergodic_projections",
                     "odd_compression_bound"):
            checks.append(_skip(name, notice))
        checks.append(product_state_laws(ctx, rng))
    else:
        checks += [representation_laws(ctx, rng), symmetrization_laws(ctx, rng),
                   product_state_laws(ctx, rng), counting_fraction(n),
                   clustering_rates(ctx)]
        checks += gns_checks(ctx, rng)
    checks.append(definetti_checks(ctx))
    return {"n": n, "seed": seed, "checks": checks,
            "passed": all(c["passed"] for c in checks)}
