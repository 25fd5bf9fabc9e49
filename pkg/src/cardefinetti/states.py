"""States on the finite CAR algebra as density matrices ``phi(A) = tr(D A)``."""
import warnings
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .car import build_context, even_odd_split, is_odd, matrix_unit, support_prefix
from .exceptions import DomainError
from .perms import Permutation, alpha, mixing_permutation, second_quantize, symmetrize_operator
from .validation import (check_density, check_mode_count, check_operator,
                         check_unit_interval, n_modes_from_dim)


@dataclass(frozen=True, eq=False)
class State:
    """Density matrix on ``n`` modes; validated on construction."""

    density: np.ndarray = field(repr=False)
    n: int = None

    def __post_init__(self):
        D = np.asarray(self.density)
        n = n_modes_from_dim(D.shape[0]) if self.n is None else self.n
        D = check_density(D, n).copy()
        D.setflags(write=False)
        object.__setattr__(self, "density", D)
        object.__setattr__(self, "n", n)

    def __call__(self, A):
        return evaluate(self, A)


def evaluate(phi, A):
    """``phi(A) = tr(D A)``."""
    A = check_operator(A, phi.n)
    return np.einsum("ij,ji->", phi.density, A)


def single_mode_density(mu):
    """Even one-mode density ``diag(mu, 1 - mu)``; ``mu = phi(a a^+)``."""
    mu = check_unit_interval(mu)
    return np.diag([mu, 1.0 - mu]).astype(np.complex128)


def product_state(mu, n):
    """Product of ``n`` copies of the even one-mode state with parameter ``mu``."""
    n = check_mode_count(n)
    rho = single_mode_density(mu)
    return State(reduce(np.kron, [rho] * n), n)


def tracial_state(n):
    n = check_mode_count(n)
    return State(np.eye(1 << n, dtype=np.complex128) / (1 << n), n)


def mixture(states, weights):
    """Convex combination of states on the same number of modes."""
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
        raise DomainError("mixture weights must be non-negative and sum to 1")
    ns = {s.n for s in states}
    if len(ns) != 1:
        raise DomainError("all states in a mixture must share the mode count")
    D = sum(w * s.density for w, s in zip(weights, states))
    return State(D / np.trace(D).real, ns.pop())


def vector_state(psi):
    psi = np.asarray(psi, dtype=np.complex128)
    psi = psi / np.linalg.norm(psi)
    return State(np.outer(psi, psi.conj()))


def random_state(n, rng, rank=None):
    """Random density matrix of the given rank (full rank by default)."""
    dim = 1 << n
    rank = dim if rank is None else rank
    G = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    D = G @ G.conj().T
    D = (D + D.conj().T) / 2
    return State(D / np.trace(D).real, n)


def symmetrize_state(ctx, phi):
    """Project ``phi`` onto permutation-invariant states.

    The density becomes ``(1/n!) sum_g Gamma(g) D Gamma(g)^*``.
    """
    D = symmetrize_operator(ctx, phi.density)
    D = (D + D.conj().T) / 2
    return State(D / np.trace(D).real, phi.n)


def symmetry_defect(ctx, phi):
    """Largest Frobenius change of the density under an adjacent transposition."""
    D = phi.density
    worst = 0.0
    for i in range(1, ctx.n):
        t = second_quantize(Permutation.transposition(ctx.n, i, i + 1))
        worst = max(worst, np.linalg.norm(t.conjugate(D) - D))
    return worst


def is_symmetric(ctx, phi, tol=1e-10):
    # adjacent transpositions generate S_n
    return symmetry_defect(ctx, phi) <= tol


def is_even(ctx, phi, tol=1e-10):
    _, odd = even_odd_split(ctx, phi.density)
    return 2 * np.linalg.norm(odd) <= tol


def anticommutator_average(ctx, phi, A):
    """``(1/n!) sum_g phi({A, alpha_g(A^*)})`` via the exact group average."""
    S = symmetrize_operator(ctx, A.conj().T)
    return evaluate(phi, A @ S + S @ A)


def oddness_decay(n_list, A_builder, state_builder=None):
    """Group-averaged anticommutator ``phi({A, alpha_g(A^*)})`` for each ``n``.

    ``A_builder(ctx)`` must return an odd operator; ``state_builder(ctx)``
    a symmetric state (defaults to the tracial state).  For ``A = a_1`` the
    value is ``1/n`` irrespective of the state.
    """
    rows = []
    for n in n_list:
        ctx = build_context(n)
        A = check_operator(A_builder(ctx), n)
        if not is_odd(ctx, A):
            raise DomainError("oddness_decay requires an odd operator")
        phi = tracial_state(n) if state_builder is None else state_builder(ctx)
        rows.append((n, anticommutator_average(ctx, phi, A).real))
    return rows


def partial_trace_tail(D, n, k):
    """Trace out modes ``k+1..n`` of a ``2**n`` square matrix."""
    rest = 1 << (n - k)
    return np.einsum("aibi->ab", D.reshape(1 << k, rest, 1 << k, rest))


def restrict(ctx, phi, k):
    """Restriction of ``phi`` to ``CAR({1..k})``."""
    if not 1 <= k <= phi.n:
        raise DomainError(f"k must lie in 1..{phi.n}, got {k}")
    if k == phi.n:
        return phi
    return State(partial_trace_tail(phi.density, phi.n, k), k)


def occupation_moments(ctx, phi, K):
    """Moments ``m_k = phi(e_11(1) ... e_11(k))`` for ``k = 0..K``."""
    if not 0 <= K <= phi.n:
        raise DomainError(f"K must lie in 0..{phi.n}, got {K}")
    if not is_symmetric(ctx, phi, tol=1e-8):
        warnings.warn("occupation moments of a non-symmetric state depend on mode order",
                      stacklevel=2)
    diag = np.ones(ctx.dim)
    moments = [1.0]
    for j in range(1, K + 1):
        # e_11(j) is diagonal, so the running product stays diagonal
        diag = diag * np.diag(matrix_unit(ctx, j, 1, 1)).real
        moments.append(float(np.dot(np.diag(phi.density).real, diag)))
    return np.array(moments)


def weak_clustering_average(ctx, phi, A, B):
    """``(1/n!) sum_g phi(alpha_g(A) B)``."""
    B = check_operator(B, ctx.n)
    return evaluate(phi, symmetrize_operator(ctx, A) @ B)


def strong_clustering_check(ctx, phi, A, B, m):
    """Clustering defect ``phi(alpha_{g_m}(A) B) - phi(A) phi(B)``.

    ``A`` and ``B`` must live on modes ``1..2^(m-1)`` so that the shifted
    ``A`` and ``B`` have disjoint supports.
    """
    g = mixing_permutation(m, ctx.n)
    half = 1 << (m - 1)
    for name, X in (("A", A), ("B", B)):
        s = support_prefix(ctx, X)
        if s > half:
            raise DomainError(f"{name} is supported on modes 1..{s}, "
                              f"beyond the g_{m} block 1..{half}")
    return evaluate(phi, alpha(g, A) @ B) - evaluate(phi, A) * evaluate(phi, B)
