"""Dense linear-algebra kernel for the coefficient estimators.

All routines work in float64 and never modify their inputs.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .exceptions import DimensionMismatch, NotPositiveDefinite


def _as_matrix(a, name: str) -> np.ndarray:
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise DimensionMismatch(f"{name} must be a nonempty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def _as_vector(b, name: str) -> np.ndarray:
    arr = np.asarray(b, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionMismatch(f"{name} must be 1-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def gram(phi) -> np.ndarray:
    """Return ``phi.T @ phi`` with an exactly symmetric result.

    Only the upper triangle of the BLAS product is kept and mirrored, so
    ``g[i, j] == g[j, i]`` holds bit for bit.
    """
    phi = _as_matrix(phi, "phi")
    g = phi.T @ phi
    upper = np.triu(g)
    return upper + np.triu(upper, 1).T


def cholesky(m):
    """Lower Cholesky factor of symmetric ``m`` in :func:`scipy.linalg.cho_factor` form.

    Raises
    ------
    NotPositiveDefinite
        If the factorization hits a non-positive pivot.
    """
    m = _as_matrix(m, "m")
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"m must be square, got {m.shape}")
    try:
        return scipy.linalg.cho_factor(m, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc


def cholesky_solve(factor, b) -> np.ndarray:
    b = _as_vector(b, "b")
    if b.shape[0] != factor[0].shape[0]:
        raise DimensionMismatch(f"b has length {b.shape[0]}, expected {factor[0].shape[0]}")
    x = scipy.linalg.cho_solve(factor, b, check_finite=False)
    if not np.all(np.isfinite(x)):
        raise NotPositiveDefinite("Cholesky solve produced non-finite values")
    return x


def spd_solve(m, b) -> np.ndarray:
    """Solve ``m @ x = b`` for symmetric positive-definite ``m`` by Cholesky.

    Raises
    ------
    NotPositiveDefinite
        If the factorization hits a non-positive pivot. Callers solving an
        unregularized system are expected to fall back to
        :func:`min_norm_lstsq`.
    """
    return cholesky_solve(cholesky(m), b)


def min_norm_lstsq(phi, g) -> np.ndarray:
    """Minimum-norm minimizer of ``||phi @ x - g||`` (SVD based)."""
    phi = _as_matrix(phi, "phi")
    g = _as_vector(g, "g")
    if g.shape[0] != phi.shape[0]:
        raise DimensionMismatch(f"g has length {g.shape[0]}, expected {phi.shape[0]}")
    x, *_ = np.linalg.lstsq(phi, g, rcond=None)
    return x
