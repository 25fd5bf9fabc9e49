"""Recovering the mixing measure of a symmetric state from its occupation moments.

A symmetric state that is a mixture of product states ``phi_mu`` has
occupation moments ``m_k = int mu^k dnu(mu)``; the measure ``nu`` is
estimated by non-negative least squares on a grid of ``[0, 1]``.
"""
from dataclasses import dataclass
from itertools import combinations

import numpy as np
import scipy.sparse as sp
from numpy.polynomial import legendre
from scipy.optimize import lsq_linear
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .car import build_context, even_odd_split, matrix_unit
from .exceptions import (DegenerateInputError, DomainError, InfeasibleMomentsError,
                         NotSymmetricError)
from .perms import symmetrize_operator
from .states import State, is_symmetric, occupation_moments, product_state
from .validation import check_mode_count, check_random_state, check_unit_interval

MERGE_PRUNE = 1e-9
_SUM_ROW_WEIGHT = 10.0


@dataclass(frozen=True)
class MixingMeasure:
    """Finitely many atoms ``(mu_j, w_j)`` on ``[0, 1]`` sorted by ``mu``."""

    atoms: tuple
    residual: float = None

    def __post_init__(self):
        atoms = tuple(sorted((float(m), float(w)) for m, w in self.atoms))
        if not atoms:
            raise DomainError("a mixing measure needs at least one atom")
        for m, w in atoms:
            check_unit_interval(m)
            if w < 0:
                raise DomainError(f"negative weight {w} at mu={m}")
        total = sum(w for _, w in atoms)
        if abs(total - 1.0) > 1e-9:
            raise DomainError(f"weights sum to {total}, expected 1")
        object.__setattr__(self, "atoms", atoms)

    @property
    def mus(self):
        return np.array([m for m, _ in self.atoms])

    @property
    def weights(self):
        return np.array([w for _, w in self.atoms])

    def moments(self, K):
        return np.array([np.dot(self.weights, self.mus ** k) for k in range(K + 1)])

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return (self.weights[None, :] * (self.mus[None, :] <= x[..., None])).sum(-1)


@dataclass(frozen=True)
class FactorType:
    tag: str
    lam: float = None

    def __post_init__(self):
        if self.tag not in ("I_infinity", "II_1", "III_lambda"):
            raise DomainError(f"unknown factor type {self.tag!r}")
        if (self.tag == "III_lambda") != (self.lam is not None):
            raise DomainError("lambda is present exactly for type III_lambda")

    def __str__(self):
        return self.tag if self.lam is None else f"{self.tag} lambda={self.lam:.12g}"


def hankel_conditions(moments):
    """Minimum eigenvalues of the truncated Hausdorff positivity matrices.

    For moments ``m_0..m_K`` on ``[0, 1]`` both localizing Hankel matrices
    must be positive semidefinite; the dict maps a readable name to the
    smallest eigenvalue of each.
    """
    m = np.asarray(moments, dtype=float)
    K = len(m) - 1
    if K == 0:
        return {}
    k = K // 2
    if K % 2 == 0:
        conds = {
            f"[m_(i+j)]_(i,j<={k}) >= 0": lambda i, j: m[i + j],
            f"[m_(i+j+1) - m_(i+j+2)]_(i,j<={k - 1}) >= 0":
                lambda i, j: m[i + j + 1] - m[i + j + 2],
        }
        sizes = [k + 1, k]
    else:
        conds = {
            f"[m_(i+j+1)]_(i,j<={k}) >= 0": lambda i, j: m[i + j + 1],
            f"[m_(i+j) - m_(i+j+1)]_(i,j<={k}) >= 0":
                lambda i, j: m[i + j] - m[i + j + 1],
        }
        sizes = [k + 1, k + 1]
    out = {}
    for (name, entry), size in zip(conds.items(), sizes):
        if size == 0:
            continue
        H = np.array([[entry(i, j) for j in range(size)] for i in range(size)])
        out[name] = float(np.linalg.eigvalsh(H)[0])
    return out


def _most_violated(moments):
    conds = hankel_conditions(moments)
    if not conds:
        return "m_0 = 1", 0.0
    name = min(conds, key=conds.get)
    return name, conds[name]


def _merge_atoms(grid, w, step):
    idx = np.flatnonzero(w > 0)
    clusters = []
    for i in idx:
        if clusters and grid[i] - clusters[-1][-1][0] <= step * (1 + 1e-9):
            clusters[-1].append((grid[i], w[i]))
        else:
            clusters.append([(grid[i], w[i])])
    atoms = []
    for cl in clusters:
        mass = sum(c[1] for c in cl)
        if mass < MERGE_PRUNE:
            continue
        atoms.append((min(1.0, max(0.0, sum(c[0] * c[1] for c in cl) / mass)), mass))
    total = sum(a[1] for a in atoms)
    return [(mu, wt / total) for mu, wt in atoms]


def _legendre_rows(K):
    """Rows mapping power moments to orthonormal shifted-Legendre moments."""
    T = np.zeros((K + 1, K + 1))
    for k in range(K + 1):
        # P_k(2x - 1) expanded in powers of x
        c = legendre.leg2poly(np.eye(k + 1)[k])
        q = np.polynomial.Polynomial(c)(np.polynomial.Polynomial([-1.0, 2.0]))
        T[k, :len(q.coef)] = q.coef * np.sqrt(2 * k + 1)
    return T


def solve_grid_weights(moments, grid_size=1001, ridge=0.0, refine=10):
    """Simplex-constrained NNLS weights on the uniform grid; returns ``(grid, w)``.

    The power rows are badly conditioned, so the fit is done against
    shifted-Legendre moments with bounded-variable least squares, followed
    by a few rounds of iterative refinement on the residual.
    """
    m = np.asarray(moments, dtype=float)
    grid = np.linspace(0.0, 1.0, grid_size)
    V = grid[None, :] ** np.arange(len(m))[:, None]
    T = _legendre_rows(len(m) - 1)
    A = T @ V
    # the k = 0 row is the simplex constraint sum(w) = m_0 = 1
    A[0] *= _SUM_ROW_WEIGHT
    if ridge > 0:
        A = np.vstack([A, np.sqrt(ridge) * np.eye(grid_size)])
    w = np.zeros(grid_size)
    for _ in range(refine):
        r = T @ (m - V @ w)
        if np.linalg.norm(r) < 1e-14:
            break
        r[0] *= _SUM_ROW_WEIGHT
        if ridge > 0:
            r = np.concatenate([r, -np.sqrt(ridge) * w])
        step = lsq_linear(A, r, bounds=(-w, np.inf), method="bvls",
                          tol=1e-15, max_iter=20 * grid_size).x
        w = np.maximum(w + step, 0.0)
    if w.sum() <= 0:
        raise InfeasibleMomentsError("NNLS returned the zero measure")
    return grid, w / w.sum()


def recover_measure(moments, grid_size=1001, tol=1e-8, ridge=0.0):
    """Estimate an atomic measure on ``[0, 1]`` with the given power moments.

    Raises ``InfeasibleMomentsError`` when the sequence violates the Hankel
    positivity conditions by more than ``tol`` or the fitted moments miss
    by more than ``tol``.
    """
    m = np.asarray(moments, dtype=float)
    if m.ndim != 1 or len(m) < 1:
        raise DomainError("moments must be a non-empty 1-D sequence")
    if grid_size < 2:
        raise DomainError("grid_size must be at least 2")
    if abs(m[0] - 1.0) > tol:
        raise InfeasibleMomentsError(f"m_0 = {m[0]!r}, a probability measure needs m_0 = 1")
    name, worst = _most_violated(m)
    if worst < -tol:
        raise InfeasibleMomentsError(
            f"moment sequence violates {name} (min eigenvalue {worst:.3e})")
    grid, w = solve_grid_weights(m, grid_size, ridge)
    V = grid[None, :] ** np.arange(len(m))[:, None]
    residual = float(np.linalg.norm(V @ w - m))
    if residual > tol:
        raise InfeasibleMomentsError(
            f"moment residual {residual:.3e} exceeds tol {tol:.1e}; "
            f"most violated condition {name} (min eigenvalue {worst:.3e})")
    step = 1.0 / (grid_size - 1)
    return MixingMeasure(tuple(_merge_atoms(grid, w, step)), residual)


def reconstruct_state(measure, n):
    """``sum_j w_j phi_{mu_j}`` on ``n`` modes."""
    n = check_mode_count(n)
    D = sum(w * product_state(mu, n).density for mu, w in measure.atoms)
    return State(D / np.trace(D).real, n)


def _tr_sparse(D, X):
    X = X.tocoo()
    return np.sum(D[X.col, X.row] * X.data)


def battery_deviation(ctx, phi, psi, n_random=50, seed=0):
    """Largest ``|phi(x) - psi(x)|`` over the observable battery.

    The battery holds every product of ``e_11(j)`` over subsets of modes,
    every two-site word ``e_kl(i) e_pq(j)`` and ``n_random`` random
    symmetrized even observables.
    """
    n = ctx.n
    Dphi, Dpsi = phi.density, psi.density
    units = {(j, k, l): sp.csr_matrix(matrix_unit(ctx, j, k, l))
             for j in range(1, n + 1) for k in (1, 2) for l in (1, 2)}
    diag11 = [np.diag(matrix_unit(ctx, j, 1, 1)).real for j in range(1, n + 1)]
    dphi, dpsi = np.diag(Dphi).real, np.diag(Dpsi).real
    occ = 0.0
    for mask in range(1 << n):
        sel = np.ones(ctx.dim)
        for j in range(n):
            if mask >> j & 1:
                sel = sel * diag11[j]
        occ = max(occ, abs(np.dot(dphi - dpsi, sel)))
    two = 0.0
    for i, j in combinations(range(1, n + 1), 2):
        for k, l, p, q in np.ndindex(2, 2, 2, 2):
            X = units[(i, k + 1, l + 1)] @ units[(j, p + 1, q + 1)]
            two = max(two, abs(_tr_sparse(Dphi, X) - _tr_sparse(Dpsi, X)))
    rng = check_random_state(seed)
    rand = 0.0
    for _ in range(n_random):
        H = rng.standard_normal((ctx.dim, ctx.dim)) + 1j * rng.standard_normal((ctx.dim, ctx.dim))
        H = (H + H.conj().T) / 2
        X = symmetrize_operator(ctx, even_odd_split(ctx, H)[0])
        X /= max(1.0, np.linalg.norm(X, 2))
        rand = max(rand, abs(np.einsum("ij,ji->", Dphi - Dpsi, X)))
    return {"occupation_products": float(occ), "two_site_words": float(two),
            "random_symmetric": float(rand), "max": float(max(occ, two, rand))}


def decompose_state(ctx, phi, grid_size=1001, tol=1e-8, n_random=50, seed=0):
    """Mixing measure of a symmetric state plus a reconstruction report."""
    if not is_symmetric(ctx, phi, tol=1e-8):
        raise NotSymmetricError("decompose_state requires a symmetric state")
    moments = occupation_moments(ctx, phi, phi.n)
    measure = recover_measure(moments, grid_size, tol)
    psi = reconstruct_state(measure, phi.n)
    battery = battery_deviation(ctx, phi, psi, n_random, seed)
    report = {
        "residual": measure.residual,
        "battery_deviation": battery["max"],
        "battery": battery,
        "moments": moments.tolist(),
    }
    return measure, report


def classify_type(mu):
    """Factor type of the GNS von Neumann algebra of the product state ``phi_mu``."""
    mu = check_unit_interval(mu)
    if mu in (0.0, 1.0):
        return FactorType("I_infinity")
    if abs(mu - 0.5) <= 1e-12:
        return FactorType("II_1")
    lam = mu / (1 - mu) if mu < 0.5 else (1 - mu) / mu
    return FactorType("III_lambda", lam)


def eigenvalue_ratio_spectrum(mu, n):
    """Distinct eigenvalues of the ``n``-mode product density and their ratios.

    Returns ``(eigenvalues, ratios)`` with the eigenvalues ascending and
    ``ratios[i] = eigenvalues[i] / eigenvalues[i + 1]``.
    """
    mu = check_unit_interval(mu)
    if mu in (0.0, 1.0):
        raise DegenerateInputError("mu in {0, 1} gives a pure state; no eigenvalue ratio")
    lam = np.linalg.eigvalsh(product_state(mu, n).density)
    distinct = []
    for x in np.sort(lam):
        if distinct and abs(x - distinct[-1][-1]) <= 1e-9 * x:
            distinct[-1].append(x)
        else:
            distinct.append([x])
    values = np.array([np.mean(c) for c in distinct])
    return values, values[:-1] / values[1:]


class MomentInverter(BaseEstimator):
    """Estimator wrapper around :func:`recover_measure`.

    ``fit`` takes the moment vector ``(m_0, ..., m_K)``.
    """

    def __init__(self, grid_size=1001, tol=1e-8, ridge=0.0):
        self.grid_size = grid_size
        self.tol = tol
        self.ridge = ridge

    def fit(self, X, y=None):
        m = np.asarray(X, dtype=float).ravel()
        self.moments_ = m
        self.measure_ = recover_measure(m, self.grid_size, self.tol, self.ridge)
        self.residual_ = self.measure_.residual
        self.atoms_ = self.measure_.mus
        self.weights_ = self.measure_.weights
        return self

    def predict(self, K):
        """Moments ``0..K`` of the fitted measure."""
        check_is_fitted(self, "measure_")
        return self.measure_.moments(K)

    def reconstruct(self, n):
        check_is_fitted(self, "measure_")
        return reconstruct_state(self.measure_, n)


class DeFinettiDecomposer(BaseEstimator):
    """Fit a symmetric :class:`~cardefinetti.states.State` to a product-state mixture."""

    def __init__(self, grid_size=1001, tol=1e-8, n_random=50, random_state=0):
        self.grid_size = grid_size
        self.tol = tol
        self.n_random = n_random
        self.random_state = random_state

    def fit(self, X, y=None):
        ctx = build_context(X.n)
        self.measure_, self.report_ = decompose_state(
            ctx, X, self.grid_size, self.tol, self.n_random, self.random_state)
        self.n_modes_ = X.n
        self.moments_ = np.array(self.report_["moments"])
        self.residual_ = self.report_["residual"]
        self.battery_deviation_ = self.report_["battery_deviation"]
        return self

    def transform(self, X):
        """Reconstructed state for ``X`` (refitting is not performed)."""
        check_is_fitted(self, "measure_")
        return reconstruct_state(self.measure_, X.n)

    def factor_types(self):
        check_is_fitted(self, "measure_")
        return [classify_type(mu) for mu in self.measure_.mus]
