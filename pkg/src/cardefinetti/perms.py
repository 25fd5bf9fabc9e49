"""Permutations of modes, their second quantization and group averages."""
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations

import numpy as np

from .car import occupation_bits
from .exceptions import CapacityError, DimensionError, DomainError
from .validation import (EXHAUSTIVE_CAP, GROUP_AVERAGE_CAP, check_mode_count,
                         check_operator, check_random_state)


@dataclass(frozen=True)
class Permutation:
    """Bijection of ``{1..n}``; ``image[j-1] = g(j)``."""

    image: tuple

    def __post_init__(self):
        img = tuple(int(x) for x in self.image)
        if sorted(img) != list(range(1, len(img) + 1)):
            raise DomainError(f"{self.image!r} is not a permutation of 1..{len(img)}")
        object.__setattr__(self, "image", img)

    @classmethod
    def identity(cls, n):
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def transposition(cls, n, i, j):
        img = list(range(1, n + 1))
        img[i - 1], img[j - 1] = j, i
        return cls(tuple(img))

    @classmethod
    def from_cycle(cls, n, *cycle):
        """Cyclic permutation ``c0 -> c1 -> ... -> c0`` on ``n`` points."""
        img = list(range(1, n + 1))
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            img[a - 1] = b
        return cls(tuple(img))

    @property
    def n(self):
        return len(self.image)

    def __call__(self, j):
        return self.image[j - 1]

    def __matmul__(self, other):
        """Composition ``(self o other)(j) = self(other(j))``."""
        if self.n != other.n:
            raise DimensionError("composing permutations of different sizes")
        return Permutation(tuple(self.image[j - 1] for j in other.image))

    def inverse(self):
        inv = [0] * self.n
        for j, gj in enumerate(self.image, start=1):
            inv[gj - 1] = j
        return Permutation(tuple(inv))

    def is_identity(self):
        return self.image == tuple(range(1, self.n + 1))


@dataclass(frozen=True, eq=False)
class FockUnitary:
    """Signed permutation matrix: column ``c`` has entry ``sign[c]`` at row ``target[c]``."""

    target: np.ndarray
    sign: np.ndarray

    @property
    def dim(self):
        return len(self.target)

    def matrix(self):
        U = np.zeros((self.dim, self.dim))
        U[self.target, np.arange(self.dim)] = self.sign
        return U

    def apply(self, v):
        """``U @ v`` for a vector or a matrix (acting on its rows)."""
        v = np.asarray(v)
        out = np.empty_like(v, dtype=np.result_type(v, np.float64))
        s = self.sign if v.ndim == 1 else self.sign[:, None]
        out[self.target] = s * v
        return out

    def conjugate(self, A):
        """``U A U^*`` in O(dim^2)."""
        A = np.asarray(A)
        out = np.empty_like(A, dtype=np.result_type(A, np.float64))
        out[np.ix_(self.target, self.target)] = (
            self.sign[:, None] * self.sign[None, :]) * A
        return out

    def adjoint(self):
        inv = np.empty_like(self.target)
        inv[self.target] = np.arange(self.dim)
        return FockUnitary(inv, self.sign[inv])

    def __matmul__(self, other):
        return FockUnitary(self.target[other.target],
                           self.sign[other.target] * other.sign)


@lru_cache(maxsize=4096)
def _second_quantize(image):
    n = len(image)
    bits = occupation_bits(n)
    g = np.asarray(image)
    # occupation of mode g(j) in the image equals occupation of mode j
    weights = 1 << (n - g)
    target = bits.astype(np.int64) @ weights
    inversions = np.zeros(1 << n, dtype=np.int64)
    for a in range(n):
        for b in range(a + 1, n):
            if g[a] > g[b]:
                inversions += bits[:, a] & bits[:, b]
    sign = np.where(inversions % 2 == 0, 1.0, -1.0)
    target.setflags(write=False)
    sign.setflags(write=False)
    return FockUnitary(target, sign)


def second_quantize(g):
    """Fock-space unitary ``Gamma(g)`` with ``Gamma(g) a_j Gamma(g)^* = a_{g(j)}``.

    ``Gamma(g)|s> = sgn * |g.s>`` where the sign is the parity of the sorting
    permutation of ``(g(j_1), ..., g(j_k))`` over the occupied modes.
    """
    check_mode_count(g.n)
    return _second_quantize(g.image)


def alpha(g, A):
    """Permutation automorphism with ``alpha_g(a_j) = a_{g^{-1}(j)}``."""
    A = check_operator(A, g.n)
    return second_quantize(g.inverse()).conjugate(A)


def _check_group_size(k, cap, what="group average"):
    if k > cap:
        raise CapacityError(
            f"exact {what} over S_{k} exceeds the cap k <= {cap}; "
            f"use sampled_group_average for larger systems")


def symmetrize_operator(ctx, A, k=None):
    """Average ``(1/k!) sum_{g in S_k} alpha_g(A)`` over permutations of modes 1..k.

    Evaluated exactly through the coset factorization
    ``S_k = union_i (i k) S_{k-1}``, which costs ``O(k^2)`` conjugations
    instead of ``k!``.
    """
    A = check_operator(A, ctx.n)
    k = ctx.n if k is None else k
    if not 1 <= k <= ctx.n:
        raise DomainError(f"subgroup size k must lie in 1..{ctx.n}, got {k}")
    _check_group_size(k, GROUP_AVERAGE_CAP)
    out = A
    for level in range(2, k + 1):
        acc = out.copy()
        for i in range(1, level):
            t = second_quantize(Permutation.transposition(ctx.n, i, level))
            acc += t.conjugate(out)
        out = acc / level
    return out


def enumerate_group(n, k=None):
    """All permutations of ``{1..n}`` fixing every point above ``k``."""
    k = n if k is None else k
    tail = tuple(range(k + 1, n + 1))
    for p in permutations(range(1, k + 1)):
        yield Permutation(p + tail)


def exhaustive_group_average(ctx, A, k=None):
    """Literal ``k!``-term average of ``alpha_g(A)``; reference for small ``k``."""
    A = check_operator(A, ctx.n)
    k = ctx.n if k is None else k
    _check_group_size(k, EXHAUSTIVE_CAP, "enumeration")
    terms = [alpha(g, A) for g in enumerate_group(ctx.n, k)]
    # pairwise reduction keeps the summation order fixed
    while len(terms) > 1:
        nxt = [terms[i] + terms[i + 1] for i in range(0, len(terms) - 1, 2)]
        if len(terms) % 2:
            nxt.append(terms[-1])
        terms = nxt
    return terms[0] / math.factorial(k)


def random_permutation(n, rng):
    return Permutation(tuple(int(x) + 1 for x in rng.permutation(n)))


def sampled_group_average(n, func, n_samples=2000, seed=0):
    """Monte-Carlo mean of ``func(g)`` over uniform ``g in S_n``.

    Returns ``(mean, standard_error)``; ``func`` must return a scalar.
    """
    rng = check_random_state(seed)
    vals = np.array([func(random_permutation(n, rng)) for _ in range(n_samples)])
    se = vals.std(ddof=1) / np.sqrt(n_samples) if n_samples > 1 else np.inf
    return vals.mean(), se


def mixing_permutation(m, n):
    """Dyadic swap ``g_m``: exchanges blocks ``[1, 2^(m-1)]`` and ``[2^(m-1)+1, 2^m]``."""
    if m < 1:
        raise DomainError(f"stage m must be >= 1, got {m}")
    half = 1 << (m - 1)
    if 2 * half > n:
        raise CapacityError(f"g_{m} moves modes up to {2 * half} but only n={n} exist")
    img = []
    for k in range(1, n + 1):
        if k <= half:
            img.append(k + half)
        elif k <= 2 * half:
            img.append(k - half)
        else:
            img.append(k)
    return Permutation(tuple(img))


def _check_counting_domain(m, k, N):
    if min(m, k) < 1 or max(m, k) >= N or m + k > N:
        raise DomainError(f"need 1 <= m, k < N and m + k <= N, got m={m}, k={k}, N={N}")


def intersecting_fraction(m, k, N):
    """Fraction of ``g in S_N`` with ``{1..m}`` meeting ``g{1..k}``.

    Returns ``(exact, estimate)`` where ``estimate = m k / N``.  The exact value
    ``1 - (N-m)!(N-k)! / ((N-m-k)! N!)`` uses integer arithmetic up to
    ``N = 20`` and log-gamma beyond.
    """
    _check_counting_domain(m, k, N)
    if N <= 20:
        miss = Fraction(math.factorial(N - m) * math.factorial(N - k),
                        math.factorial(N - m - k) * math.factorial(N))
        exact = float(1 - miss)
    else:
        log_miss = (math.lgamma(N - m + 1) + math.lgamma(N - k + 1)
                    - math.lgamma(N - m - k + 1) - math.lgamma(N + 1))
        exact = -math.expm1(log_miss)
    return exact, m * k / N


def intersecting_fraction_bruteforce(m, k, N):
    """Exact fraction by enumerating all of ``S_N`` (``N <= 8``)."""
    _check_counting_domain(m, k, N)
    _check_group_size(N, EXHAUSTIVE_CAP, "enumeration")
    first = set(range(1, m + 1))
    hits = sum(1 for p in permutations(range(1, N + 1))
               if first.intersection(p[:k]))
    return Fraction(hits, math.factorial(N))
