"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""
import numpy as np

from .exceptions import CapacityError, DimensionError, DomainError

MAX_MODES = 10
GROUP_AVERAGE_CAP = 10
EXHAUSTIVE_CAP = 8


def check_mode_count(n, cap=MAX_MODES):
    """Return ``n`` as an int after checking ``1 <= n <= cap``."""
    if isinstance(n, bool) or int(n) != n:
        raise DomainError(f"mode count must be an integer, got {n!r}")
    n = int(n)
    if n < 1:
        raise DomainError(f"mode count must be >= 1, got {n}")
    if n > cap:
        raise CapacityError(
            f"n={n} exceeds the implementation cap of {cap} modes "
            f"(dense 2^n x 2^n matrices)")
    return n


def n_modes_from_dim(dim):
    n = int(dim).bit_length() - 1
    if n < 1 or (1 << n) != dim:
        raise DimensionError(f"dimension {dim} is not a power of two >= 2")
    return n


def check_operator(A, n=None):
    """Validate a square operator, returning it as a complex ndarray.

    If ``n`` is given the operator must be ``2**n x 2**n``.
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"operator must be a square matrix, got shape {A.shape}")
    if n is None:
        n_modes_from_dim(A.shape[0])
    elif A.shape[0] != 1 << n:
        raise DimensionError(
            f"operator has dimension {A.shape[0]}, expected 2^{n} = {1 << n}")
    if not np.all(np.isfinite(A)):
        raise DomainError("operator contains non-finite entries")
    return A.astype(np.complex128, copy=False)


def check_density(D, n=None, tol=1e-10, trace_tol=1e-12):
    """Validate a density matrix: Hermitian, PSD and unit trace."""
    D = check_operator(D, n)
    scale = max(1.0, np.abs(D).max())
    if np.abs(D - D.conj().T).max() > tol * scale:
        raise DomainError("density matrix is not Hermitian")
    tr = np.trace(D)
    if abs(tr - 1.0) > trace_tol:
        raise DomainError(f"density trace is {tr.real:.15g}, expected 1")
    lo = np.linalg.eigvalsh((D + D.conj().T) / 2)[0]
    if lo < -tol:
        raise DomainError(f"density has negative eigenvalue {lo:.3e}")
    return D


def check_unit_interval(x, name="mu"):
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {x}")
    return x


def check_random_state(seed):
    """Return a ``numpy.random.Generator`` (PCG64) from a seed or generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
