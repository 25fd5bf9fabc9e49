"""Finite CAR algebra on ``n`` modes realized as dense ``2**n x 2**n`` matrices.

Basis convention: the Fock basis vector with occupation bitstring
``s = (s_1, ..., s_n)`` sits at index ``sum_j s_j 2**(n-j)`` (mode 1 is the
most significant bit) and equals ``a_{j_1}^+ ... a_{j_k}^+ |vac>`` with the
occupied modes in increasing order.  Annihilators carry Jordan-Wigner
strings on the modes preceding them.
"""
from dataclasses import dataclass, field
from functools import reduce
from itertools import product

import numpy as np
import scipy.sparse as sp

from .exceptions import DimensionError, DomainError, IdentityCheckError
from .validation import check_mode_count, check_operator

_SIGMA = np.array([[0, 1], [0, 0]], dtype=np.complex128)
_Z = np.diag([1.0, -1.0]).astype(np.complex128)
_I2 = np.eye(2, dtype=np.complex128)


def elementary_matrix(k, l):
    """2x2 matrix unit with a single 1 at (k, l), indices in {1, 2}."""
    if k not in (1, 2) or l not in (1, 2):
        raise DomainError(f"matrix-unit indices must be 1 or 2, got ({k}, {l})")
    eps = np.zeros((2, 2), dtype=np.complex128)
    eps[k - 1, l - 1] = 1.0
    return eps


def occupation_bits(n):
    """Array of shape ``(2**n, n)``; column ``j-1`` is the occupation of mode j."""
    idx = np.arange(1 << n)
    shifts = n - 1 - np.arange(n)
    return ((idx[:, None] >> shifts[None, :]) & 1).astype(np.int8)


@dataclass(frozen=True, eq=False)
class CarContext:
    """Generators, parity and Jordan-Wigner data for CAR on ``n`` modes."""

    n: int
    annihilators: tuple = field(repr=False)
    parity_diag: np.ndarray = field(repr=False)
    string_diag: tuple = field(repr=False)

    @property
    def dim(self):
        return 1 << self.n

    @property
    def identity(self):
        return np.eye(self.dim, dtype=np.complex128)

    @property
    def parity_unitary(self):
        return np.diag(self.parity_diag).astype(np.complex128)

    def a(self, j):
        """Annihilator of mode ``j`` (1-indexed)."""
        return self.annihilators[self._mode(j)]

    def adag(self, j):
        return self.annihilators[self._mode(j)].conj().T

    def number(self, j):
        """Occupation number ``a_j^+ a_j`` as a dense matrix."""
        bits = occupation_bits(self.n)[:, self._mode(j)]
        return np.diag(bits.astype(np.complex128))

    def _mode(self, j):
        if isinstance(j, bool) or int(j) != j or not 1 <= j <= self.n:
            raise DomainError(f"mode index must lie in 1..{self.n}, got {j!r}")
        return int(j) - 1

    def _sparse_a(self, j):
        return sp.csr_matrix(self.a(j))


def build_context(n):
    """Build the annihilators ``a_1..a_n`` and the parity data for ``n`` modes."""
    n = check_mode_count(n)
    ann = []
    for j in range(1, n + 1):
        factors = [_Z] * (j - 1) + [_SIGMA] + [_I2] * (n - j)
        ann.append(reduce(np.kron, factors))
    bits = occupation_bits(n)
    parity = np.where(bits.sum(axis=1) % 2 == 0, 1.0, -1.0)
    # U_j = a_j a_j^+ - a_j^+ a_j is diagonal; read it off the row/column norms
    strings = [np.ones(1 << n)]
    for a in ann:
        u = (np.abs(a) ** 2).sum(axis=1) - (np.abs(a) ** 2).sum(axis=0)
        strings.append(strings[-1] * u)
    for arr in ann:
        arr.setflags(write=False)
    parity.setflags(write=False)
    for s in strings:
        s.setflags(write=False)
    return CarContext(n=n, annihilators=tuple(ann), parity_diag=parity,
                      string_diag=tuple(strings))


def anticommutator(A, B):
    return A @ B + B @ A


def commutator(A, B):
    return A @ B - B @ A


def dagger(A):
    return np.asarray(A).conj().T


def parity(ctx, A):
    """Apply the parity automorphism ``A -> P A P``."""
    A = check_operator(A, ctx.n)
    p = ctx.parity_diag
    return p[:, None] * A * p[None, :]


def even_odd_split(ctx, A):
    """Return ``(A_plus, A_minus)`` with ``A = A_plus + A_minus``."""
    A = check_operator(A, ctx.n)
    theta = parity(ctx, A)
    return (A + theta) / 2, (A - theta) / 2


def is_odd(ctx, A, tol=1e-12):
    even, _ = even_odd_split(ctx, A)
    return np.linalg.norm(even) <= tol * max(1.0, np.linalg.norm(A))


def is_even_operator(ctx, A, tol=1e-12):
    _, odd = even_odd_split(ctx, A)
    return np.linalg.norm(odd) <= tol * max(1.0, np.linalg.norm(A))


def matrix_unit(ctx, j, k, l):
    """Jordan-Klein-Wigner matrix unit ``e_kl(j)``.

    ``e_11 = a a^+``, ``e_22 = a^+ a``, ``e_12 = V_{j-1} a``,
    ``e_21 = V_{j-1} a^+`` where ``V_{j-1}`` is the product of
    ``U_i = a_i a_i^+ - a_i^+ a_i`` over ``i < j``.
    """
    ctx._mode(j)
    if k not in (1, 2) or l not in (1, 2):
        raise DomainError(f"matrix-unit indices must be 1 or 2, got ({k}, {l})")
    a = ctx._sparse_a(j)
    if (k, l) == (1, 1):
        return (a @ a.conj().T).toarray()
    if (k, l) == (2, 2):
        return (a.conj().T @ a).toarray()
    v = ctx.string_diag[j - 1]
    gen = ctx.a(j) if (k, l) == (1, 2) else ctx.adag(j)
    return v[:, None] * gen


def site_tensor(n, factors):
    """Pure tensor with ``factors[j]`` at site ``j`` and identity elsewhere."""
    mats = [factors.get(j, _I2) for j in range(1, n + 1)]
    return reduce(np.kron, mats)


def gamma_iso(ctx, word, atol=0.0):
    """Product of JKW matrix units for ``word`` checked against its tensor image.

    ``word`` is a sequence of ``(site, k, l)``.  The product
    ``e_{k1 l1}(j1) ... e_{km lm}(jm)`` is returned after verifying that it
    equals ``eps_{k1 l1} (x) ... (x) eps_{km lm}`` entrywise.
    """
    sites = [w[0] for w in word]
    if len(set(sites)) != len(sites):
        raise DomainError(f"repeated site in word {word!r}")
    lhs = ctx.identity
    factors = {}
    for j, k, l in word:
        lhs = lhs @ matrix_unit(ctx, j, k, l)
        factors[j] = elementary_matrix(k, l)
    rhs = site_tensor(ctx.n, factors)
    dev = np.abs(lhs - rhs).max()
    if dev > atol:
        raise IdentityCheckError(f"gamma isomorphism violated for {word!r}: {dev:.3e}")
    return lhs


def all_words(n):
    """Every matrix-unit word touching sites ``1..n`` (each site: absent or k,l)."""
    choices = [None, (1, 1), (1, 2), (2, 1), (2, 2)]
    for combo in product(choices, repeat=n):
        yield [(j + 1, *kl) for j, kl in enumerate(combo) if kl is not None]


def normalized_trace(ctx, A):
    """Unique tracial state ``tr(A) / 2**n``."""
    A = check_operator(A, ctx.n)
    return np.trace(A) / ctx.dim


def embed_single(ctx, j, M):
    """Image of a 2x2 matrix under ``M_2 ~ CAR({j})`` (``a_j`` <-> lowering matrix)."""
    M = np.asarray(M)
    if M.shape != (2, 2):
        raise DimensionError(f"expected a 2x2 matrix, got {M.shape}")
    a, ad = ctx.a(j), ctx.adag(j)
    return M[0, 0] * (a @ ad) + M[0, 1] * a + M[1, 0] * ad + M[1, 1] * (ad @ a)


def local_monomials(ctx, modes):
    """All ordered monomials ``x_{j1} ... x_{jk}`` with ``x in {1, a, a^+, a^+ a}``."""
    modes = sorted(modes)
    out = []
    for picks in product(range(4), repeat=len(modes)):
        M = ctx.identity
        for j, p in zip(modes, picks):
            if p == 1:
                M = M @ ctx.a(j)
            elif p == 2:
                M = M @ ctx.adag(j)
            elif p == 3:
                M = M @ (ctx.adag(j) @ ctx.a(j))
        out.append(M)
    return out


def random_local_operator(ctx, modes, rng):
    """Random element of ``CAR(modes)`` as a complex combination of monomials."""
    modes = sorted(modes)
    if modes == list(range(1, len(modes) + 1)):
        # a prefix of modes generates exactly M_{2^s} (x) 1
        s = len(modes)
        X = rng.standard_normal((1 << s, 1 << s)) + 1j * rng.standard_normal((1 << s, 1 << s))
        return np.kron(X, np.eye(1 << (ctx.n - s)))
    monos = local_monomials(ctx, modes)
    coef = rng.standard_normal(len(monos)) + 1j * rng.standard_normal(len(monos))
    return sum(c * M for c, M in zip(coef, monos))


def support_prefix(ctx, A, tol=1e-12):
    """Smallest ``s`` with ``A`` in ``CAR({1..s})``, i.e. ``A = X (x) 1``."""
    A = check_operator(A, ctx.n)
    scale = max(1.0, np.abs(A).max())
    for s in range(ctx.n + 1):
        rest = 1 << (ctx.n - s)
        blocks = A.reshape(1 << s, rest, 1 << s, rest)
        X = np.einsum("aibi->ab", blocks) / rest
        if np.abs(np.kron(X, np.eye(rest)) - A).max() <= tol * scale:
            return s
    return ctx.n
