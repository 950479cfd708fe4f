"""Polynomial term expansion for rule consequents.

Canonical term order (layout version ``"poly/1"``)::

    1, x1, ..., xn, x1*x1, x1*x2, ..., x1*xn, x2*x2, ..., xn*xn

i.e. the constant, then the linear terms, then one quadratic term per
unordered pair ``j <= s`` in lexicographic order. Serialized coefficient
vectors depend on this order, so it must not change without bumping
:data:`TERM_LAYOUT_VERSION`.
"""

from __future__ import annotations

import enum

import numpy as np

from .exceptions import IndexOutOfRange

TERM_LAYOUT_VERSION = "poly/1"

ORDERS = (0, 1, 2)


class TermGroup(enum.Enum):
    CONSTANT = "constant"
    LINEAR = "linear"
    QUADRATIC = "quadratic"


def check_order(order: int) -> int:
    if isinstance(order, bool) or int(order) != order or order not in ORDERS:
        raise ValueError(f"polynomial order must be one of {ORDERS}, got {order!r}")
    return int(order)


def term_count(n: int, order: int) -> int:
    """Number of consequent terms for ``n`` inputs."""
    order = check_order(order)
    if n < 1:
        raise ValueError(f"input dimension must be >= 1, got {n}")
    if order == 0:
        return 1
    if order == 1:
        return n + 1
    return (n * n + 3 * n + 2) // 2


def quadratic_pairs(n: int) -> list[tuple[int, int]]:
    """Zero-based ``(j, s)`` pairs with ``j <= s`` in canonical order."""
    return [(j, s) for j in range(n) for s in range(j, n)]


def expand_terms(x, order: int) -> np.ndarray:
    """Expand inputs into polynomial terms.

    Parameters
    ----------
    x : array_like, shape (n,) or (N, n)
        One pattern or a batch of patterns.
    order : {0, 1, 2}

    Returns
    -------
    ndarray, shape (T,) or (N, T)
        ``T = term_count(n, order)``, columns in canonical order.
    """
    order = check_order(order)
    arr = np.asarray(x, dtype=np.float64)
    single = arr.ndim == 1
    X = arr[None, :] if single else arr
    if X.ndim != 2:
        raise ValueError(f"x must be 1-D or 2-D, got shape {arr.shape}")
    N, n = X.shape
    cols = [np.ones((N, 1))]
    if order >= 1:
        cols.append(X)
    if order == 2:
        j, s = np.triu_indices(n)
        cols.append(X[:, j] * X[:, s])
    out = np.hstack(cols)
    return out[0] if single else out


def term_group_of(index: int, n: int, order: int) -> TermGroup:
    if not 0 <= index < term_count(n, order):
        raise IndexOutOfRange(f"term index {index} out of range for n={n}, order={order}")
    if index == 0:
        return TermGroup.CONSTANT
    if index <= n:
        return TermGroup.LINEAR
    return TermGroup.QUADRATIC


def term_groups(n: int, order: int) -> list[TermGroup]:
    return [term_group_of(t, n, order) for t in range(term_count(n, order))]
