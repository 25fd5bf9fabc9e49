"""Finite-dimensional GNS representation with covariant permutation unitaries.

For ``phi(x) = tr(D x)`` with ``D = V diag(lam) V^*`` (keeping the ``r``
non-null eigenpairs) the GNS space is ``C^(2^n) (x) C^r``: the class of ``X``
is the ``2^n x r`` matrix ``X V sqrt(lam)``, flattened row-major.  Then
``rep(A) = A (x) 1_r``, ``Omega = V sqrt(lam)`` and the unitary implementing
``alpha_g`` acts as ``xi -> W xi C`` with ``W = Gamma(g^{-1})`` and
``C = V^* W^* V``.  Since ``alpha_g alpha_h = alpha_{hg}`` these unitaries
satisfy ``U(g) U(h) = U(hg)``; group averages are unaffected.
"""
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .car import is_odd
from .exceptions import CapacityError, DomainError, NotSymmetricError
from .perms import Permutation, mixing_permutation, second_quantize, symmetrize_operator
from .states import evaluate, is_symmetric
from .validation import EXHAUSTIVE_CAP, check_operator

DENSE_GNS_CAP = 1024


@dataclass(frozen=True, eq=False)
class GnsRep:
    ctx: object = field(repr=False)
    phi: object = field(repr=False)
    basis: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    covariant: bool = True
    diagonal_support: bool = False

    @property
    def rank(self):
        return self.basis.shape[1]

    @property
    def dim(self):
        return self.ctx.dim * self.rank

    @property
    def cyclic_vector(self):
        return (self.basis * np.sqrt(self.weights)[None, :]).ravel()

    def vector(self, X):
        """GNS class of the algebra element ``X``: ``rep(X) Omega``."""
        X = check_operator(X, self.ctx.n)
        return (X @ self.basis * np.sqrt(self.weights)[None, :]).ravel()

    def rep(self, A):
        A = check_operator(A, self.ctx.n)
        _check_dense(self.dim)
        return np.kron(A, np.eye(self.rank))

    def apply_rep(self, A, xi):
        A = check_operator(A, self.ctx.n)
        return (A @ np.asarray(xi).reshape(self.ctx.dim, self.rank)).ravel()

    def inner(self, xi, eta):
        """``<xi, eta>``, linear in the first argument."""
        return np.vdot(eta, xi)

    def _factors(self, g):
        if not self.covariant:
            raise NotSymmetricError("GNS representation was built without covariance")
        W = second_quantize(g.inverse())
        C = self.basis.conj().T @ W.adjoint().apply(self.basis)
        return W, C

    def apply_unitary(self, g, xi, inverse=False):
        W, C = self._factors(g)
        if inverse:
            W, C = W.adjoint(), C.conj().T
        M = np.asarray(xi).reshape(self.ctx.dim, self.rank)
        return (W.apply(M) @ C).ravel()

    def covariant_unitary(self, g):
        _check_dense(self.dim)
        W, C = self._factors(g)
        return np.kron(W.matrix(), C.T)

    def signed_unitary(self, g):
        """``U(g)`` as ``(target, phase)`` arrays when it is monomial, else ``None``."""
        W, C = self._factors(g)
        nz = np.abs(C) > 1e-12
        if not np.all(nz.sum(axis=1) == 1):
            return None
        col = nz.argmax(axis=1)
        phase = C[np.arange(self.rank), col]
        target = (W.target[:, None] * self.rank + col[None, :]).ravel()
        sign = (W.sign[:, None] * phase[None, :]).ravel()
        return target, sign


def _check_dense(dim):
    if dim > DENSE_GNS_CAP:
        raise CapacityError(f"dense GNS matrices of dimension {dim} exceed the cap "
                            f"{DENSE_GNS_CAP}; use the vector-level operations")


def build_gns(ctx, phi, covariant=True, cutoff=1e-12):
    """GNS data of ``phi``; null directions have eigenvalue below ``cutoff * max``."""
    if phi.n != ctx.n:
        raise DomainError("state and context have different mode counts")
    if covariant and not is_symmetric(ctx, phi):
        raise NotSymmetricError("covariant GNS data requires a symmetric state")
    D = phi.density
    offdiag = D - np.diag(np.diag(D))
    if not np.any(offdiag):
        lam = np.diag(D).real
        keep = np.flatnonzero(lam > cutoff * lam.max())
        basis = np.eye(ctx.dim, dtype=np.complex128)[:, keep]
        weights = lam[keep]
        diagonal = True
    else:
        lam, vecs = np.linalg.eigh((D + D.conj().T) / 2)
        keep = lam > cutoff * lam.max()
        basis, weights = vecs[:, keep], lam[keep]
        diagonal = False
    return GnsRep(ctx, phi, basis, weights, covariant, diagonal)


def _transposition(n, i, j):
    return Permutation.transposition(n, i, j)


def _left_apply(gns, g, M):
    """``U(g) @ M`` for a dense matrix ``M``."""
    signed = gns.signed_unitary(g)
    if signed is not None:
        target, sign = signed
        out = np.empty_like(M, dtype=np.complex128)
        out[target] = sign[:, None] * M
        return out
    return gns.covariant_unitary(g) @ M


def _conjugate(gns, g, M):
    """``U(g) M U(g)^*`` for a dense matrix ``M``."""
    signed = gns.signed_unitary(g)
    if signed is not None:
        target, sign = signed
        out = np.empty_like(M, dtype=np.complex128)
        out[np.ix_(target, target)] = sign[:, None] * M * sign.conj()[None, :]
        return out
    U = gns.covariant_unitary(g)
    return U @ M @ U.conj().T


def invariant_projection(gns, k):
    """``E_k = (1/k!) sum_{g in S_k} U(g)`` for ``S_k`` permuting modes ``1..k``.

    Built from ``E_k = T_k E_{k-1}`` with ``T_k`` the average over the
    coset representatives ``(i k)``.
    """
    n = gns.ctx.n
    if not 1 <= k <= n:
        raise DomainError(f"k must lie in 1..{n}, got {k}")
    if k > EXHAUSTIVE_CAP:
        raise CapacityError(f"projection over S_{k} exceeds the cap {EXHAUSTIVE_CAP}")
    _check_dense(gns.dim)
    E = np.eye(gns.dim, dtype=np.complex128)
    for level in range(2, k + 1):
        acc = E.copy()
        for i in range(1, level):
            acc += _left_apply(gns, _transposition(n, i, level), E)
        E = acc / level
    return E


def exhaustive_invariant_projection(gns, k):
    """Literal ``k!``-term average of the covariant unitaries (small ``k`` only)."""
    from .perms import enumerate_group

    _check_dense(gns.dim)
    if k > 5:
        raise CapacityError("literal projection enumeration is limited to k <= 5")
    E = sum(gns.covariant_unitary(g) for g in enumerate_group(gns.ctx.n, k))
    return E / math.factorial(k)


def fixed_space_projection(gns):
    """Projection onto ``{xi : U(t) xi = xi}`` for every transposition ``t``.

    Computed as the null space of ``sum_t (U(t) - 1)^* (U(t) - 1)``, with no
    group averaging involved.
    """
    _check_dense(gns.dim)
    n = gns.ctx.n
    G = np.zeros((gns.dim, gns.dim), dtype=np.complex128)
    for i in range(1, n):
        for j in range(i + 1, n + 1):
            U = gns.covariant_unitary(_transposition(n, i, j))
            G += 2 * np.eye(gns.dim) - U - U.conj().T
    lam, vecs = np.linalg.eigh((G + G.conj().T) / 2)
    null = vecs[:, lam < 1e-9 * max(1.0, lam.max())]
    return null @ null.conj().T


def fixed_space_basis(gns):
    """Orthonormal basis (sparse columns) of the ``S_n``-invariant GNS vectors.

    When every ``U(t)`` is a monomial matrix the basis is assembled from
    orbits of the basis vectors under adjacent transpositions: an orbit
    contributes its signed indicator unless the signs along the orbit are
    inconsistent.  Otherwise the dense null-space route is used.
    """
    n = gns.ctx.n
    gens = []
    for i in range(1, n):
        signed = gns.signed_unitary(_transposition(n, i, i + 1))
        if signed is None:
            gens = None
            break
        gens.append((signed[0].tolist(), signed[1].tolist()))
    if gens is None:
        P = fixed_space_projection(gns)
        lam, vecs = np.linalg.eigh(P)
        return sp.csc_matrix(vecs[:, lam > 0.5])
    N = gns.dim
    phase = [None] * N
    rows, cols, vals = [], [], []
    n_cols = 0
    for start in range(N):
        if phase[start] is not None:
            continue
        phase[start] = 1.0 + 0j
        orbit, consistent, head = [start], True, 0
        while head < len(orbit):
            x = orbit[head]
            head += 1
            for target, sign in gens:
                y, py = target[x], sign[x] * phase[x]
                if phase[y] is None:
                    phase[y] = py
                    orbit.append(y)
                elif abs(phase[y] - py) > 1e-9:
                    consistent = False
        if consistent:
            norm = 1 / math.sqrt(len(orbit))
            for x in orbit:
                rows.append(x)
                cols.append(n_cols)
                # U(t) e_x = s e_y, so the invariant vector weights e_y by s * w_x
                vals.append(phase[x] * norm)
            n_cols += 1
    return sp.csc_matrix((vals, (rows, cols)), shape=(N, n_cols))


def nested_ergodic_check(gns, tol=1e-10):
    """Check that ``E_1 >= E_2 >= ... >= E_n`` stabilizes at the fixed-space projection."""
    n = gns.ctx.n
    chain = [invariant_projection(gns, k) for k in range(1, n + 1)]
    loewner = min((np.linalg.eigvalsh(chain[k] - chain[k + 1])[0]
                   for k in range(n - 1)), default=0.0)
    idem = max(np.abs(E @ E - E).max() for E in chain)
    herm = max(np.abs(E - E.conj().T).max() for E in chain)
    P = fixed_space_projection(gns)
    deviation = np.abs(chain[-1] - P).max()
    report = {
        "n": n,
        "gns_dim": gns.dim,
        "fixed_dim": int(round(np.trace(P).real)),
        "loewner_min_eigenvalue": float(loewner),
        "idempotency_deviation": float(idem),
        "selfadjoint_deviation": float(herm),
        "fixed_space_deviation": float(deviation),
    }
    report["passed"] = bool(loewner >= -tol and idem <= tol and herm <= tol
                            and deviation <= tol)
    return report


def represented_center(gns, tol=1e-10):
    """Basis of the center of ``rep(CAR)``, as ``2^n x 2^n`` matrices.

    ``rep`` is injective, so the center is the set of ``X`` commuting with
    every ``a_j``.  It is one-dimensional (the scalars) for every state.
    """
    ctx = gns.ctx
    if ctx.dim > 16:
        raise CapacityError("center computation is limited to n <= 4")
    I = np.eye(ctx.dim)
    blocks = []
    for j in range(1, ctx.n + 1):
        for a in (ctx.a(j), ctx.adag(j)):
            # vec([X, a]) = (1 (x) a^T - a (x) 1) vec(X) for row-major vec
            blocks.append(np.kron(I, a.T) - np.kron(a, I))
    M = np.vstack(blocks) if blocks else np.zeros((1, ctx.dim ** 2))
    _, s, vh = np.linalg.svd(M)
    s = np.concatenate([s, np.zeros(vh.shape[0] - len(s))])
    null = vh[s <= tol * max(1.0, s.max())]
    return [v.conj().reshape(ctx.dim, ctx.dim) for v in null]


def cesaro_conjugation_average(gns, A):
    """``(1/n!) sum_g U(g) rep(A) U(g)^{-1}`` as a dense GNS matrix."""
    n = gns.ctx.n
    if n > EXHAUSTIVE_CAP:
        raise CapacityError(f"Cesaro average over S_{n} exceeds the cap {EXHAUSTIVE_CAP}")
    M = gns.rep(A)
    for level in range(2, n + 1):
        acc = M.copy()
        for i in range(1, level):
            acc += _conjugate(gns, _transposition(n, i, level), M)
        M = acc / level
    return M


def cesaro_matrix_element(gns, A, B, C):
    """``<avg_g U(g) rep(A) U(g)^{-1} rep(B) Omega, rep(C^*) Omega>``.

    Uses covariance (the average equals ``rep`` of the symmetrized ``A``) so
    it stays vector-level for any ``n`` within the group-average cap.
    """
    SA = symmetrize_operator(gns.ctx, A)
    xi = gns.apply_rep(SA, gns.vector(B))
    eta = gns.vector(np.asarray(C).conj().T)
    return gns.inner(xi, eta)


def mixing_conjugation_deviation(gns, A, B, C, m=None):
    """``<U(g_m) rep(A) U(g_m)^{-1} xi, eta> - phi(A) <xi, eta>``.

    ``xi = rep(B) Omega`` and ``eta = rep(C^*) Omega``; ``m`` defaults to the
    largest stage with ``2^m <= n``.
    """
    n = gns.ctx.n
    m = int(math.log2(n)) if m is None else m
    g = mixing_permutation(m, n)
    xi = gns.vector(B)
    eta = gns.vector(np.asarray(C).conj().T)
    moved = gns.apply_unitary(g, gns.apply_rep(A, gns.apply_unitary(g, xi, inverse=True)))
    return gns.inner(moved, eta) - evaluate(gns.phi, A) * gns.inner(xi, eta)


def fixed_space_compression(gns, A, Q=None):
    """Matrix of ``rep(A)`` compressed to the invariant subspace, in basis ``Q``."""
    Q = fixed_space_basis(gns) if Q is None else Q
    A = check_operator(A, gns.ctx.n)
    repA = sp.kron(sp.csr_matrix(A), sp.identity(gns.rank), format="csr")
    return (Q.conj().T @ (repA @ Q)).toarray()


def ep_odd_compression(gns, A, Q=None):
    """Operator norm of ``E rep(A) E`` for odd ``A``, ``E`` the invariant projection."""
    A = check_operator(A, gns.ctx.n)
    if not is_odd(gns.ctx, A):
        raise DomainError("ep_odd_compression requires an odd operator")
    M = fixed_space_compression(gns, A, Q)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))
