"""Fuzzy C-Means partitioning of the input space.

Memberships are stored cluster-major, shape ``(c, N)``; each column is a
distribution over clusters. The partition grades double as rule matching
degrees in :mod:`rsfrm.model`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionMismatch, EmptyCluster, InsufficientData


@dataclass(frozen=True)
class FcmConfig:
    clusters: int
    fuzzifier: float = 2.0
    max_iterations: int = 300
    tolerance: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.clusters < 1:
            raise ValueError(f"clusters must be >= 1, got {self.clusters}")
        if not self.fuzzifier > 1:
            raise ValueError(f"fuzzifier must be > 1, got {self.fuzzifier}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be > 0")
        if self.seed < 0:
            raise ValueError("seed must be unsigned")


@dataclass(frozen=True)
class FcmPartition:
    """Result of :func:`fit_fcm`.

    ``memberships`` are consistent with ``prototypes``: they equal
    ``update_memberships(data, prototypes, m)`` for the training data.
    ``loss_history`` holds the objective after each full iteration.
    """

    prototypes: np.ndarray
    memberships: np.ndarray
    final_loss: float
    iterations_run: int
    loss_history: tuple = field(default=(), repr=False)
    membership_history: tuple = field(default=(), repr=False)


def _squared_distances(data: np.ndarray, prototypes: np.ndarray) -> np.ndarray:
    # (c, N)
    diff = data[None, :, :] - prototypes[:, None, :]
    return np.einsum("cnk,cnk->cn", diff, diff)


def _check_dims(data, prototypes):
    X = np.atleast_2d(np.asarray(data, dtype=np.float64))
    V = np.atleast_2d(np.asarray(prototypes, dtype=np.float64))
    if X.shape[1] != V.shape[1]:
        raise DimensionMismatch(
            f"data has {X.shape[1]} variables but prototypes have {V.shape[1]}"
        )
    return X, V


def fcm_loss(data, prototypes, memberships, m: float) -> float:
    """Weighted within-cluster scatter ``sum_i sum_k u_ik**m * ||x_k - v_i||**2``."""
    X, V = _check_dims(data, prototypes)
    U = np.atleast_2d(np.asarray(memberships, dtype=np.float64))
    if U.shape != (V.shape[0], X.shape[0]):
        raise DimensionMismatch(
            f"memberships shape {U.shape} does not match (c, N) = {(V.shape[0], X.shape[0])}"
        )
    return float(np.sum(U**m * _squared_distances(X, V)))


def _memberships_from_sqdist(d2: np.ndarray, m: float) -> np.ndarray:
    c, N = d2.shape
    U = np.empty_like(d2)
    zero = d2 == 0.0
    hit = zero.any(axis=0)
    if np.any(~hit):
        # u_ik = d_ik^(-2/(m-1)) / sum_j d_jk^(-2/(m-1)); d2 is already squared.
        # Scaling by the column minimum keeps every power in (0, 1].
        ratio = d2[:, ~hit] / d2[:, ~hit].min(axis=0, keepdims=True)
        inv = ratio ** (-1.0 / (m - 1.0))
        U[:, ~hit] = inv / inv.sum(axis=0, keepdims=True)
    if np.any(hit):
        # Coincident point: all mass on the first zero-distance cluster.
        first = np.argmax(zero[:, hit], axis=0)
        block = np.zeros((c, first.size))
        block[first, np.arange(first.size)] = 1.0
        U[:, hit] = block
    return U


def update_memberships(data, prototypes, m: float) -> np.ndarray:
    """Membership matrix of shape ``(c, N)`` for fixed prototypes."""
    X, V = _check_dims(data, prototypes)
    return _memberships_from_sqdist(_squared_distances(X, V), m)


def membership_of(x, prototypes, m: float) -> np.ndarray:
    """Membership vector of a single pattern, shape ``(c,)``."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionMismatch(f"x must be a vector, got shape {x.shape}")
    return update_memberships(x[None, :], prototypes, m)[:, 0]


def update_prototypes(data, memberships, m: float) -> np.ndarray:
    """Prototype matrix ``(c, n)`` as membership-weighted means.

    Raises
    ------
    EmptyCluster
        If any cluster has zero total weight.
    """
    X = np.atleast_2d(np.asarray(data, dtype=np.float64))
    U = np.atleast_2d(np.asarray(memberships, dtype=np.float64))
    if U.shape[1] != X.shape[0]:
        raise DimensionMismatch(f"memberships cover {U.shape[1]} patterns, data has {X.shape[0]}")
    W = U**m
    totals = W.sum(axis=1)
    empty = np.flatnonzero(totals <= 0.0)
    if empty.size:
        raise EmptyCluster(empty.tolist())
    return (W @ X) / totals[:, None]


def _reseed_empty(X, V, clusters):
    # Move each empty prototype onto the currently worst-fitted pattern.
    V = V.copy()
    for i in clusters:
        nearest = _squared_distances(X, V).min(axis=0)
        V[i] = X[int(np.argmax(nearest))]
    return V


def fit_fcm(data, config: FcmConfig, *, init=None, record_history: bool = False) -> FcmPartition:
    """Alternate membership and prototype updates until convergence.

    Prototypes start at ``c`` distinct data rows drawn with
    ``numpy.random.default_rng(config.seed)``. Iteration stops once the
    largest membership change is at most ``config.tolerance`` or after
    ``config.max_iterations`` prototype updates.

    ``init`` overrides the random start with explicit ``(c, n)`` prototypes.
    With ``record_history=True`` the membership matrix of every iterate is
    kept in ``membership_history`` (memory heavy; meant for diagnostics).
    """
    X = np.atleast_2d(np.asarray(data, dtype=np.float64))
    if not np.all(np.isfinite(X)):
        raise ValueError("data contains non-finite values")
    N = X.shape[0]
    c, m = config.clusters, config.fuzzifier
    if N < c:
        raise InsufficientData(f"{N} patterns cannot support {c} clusters")

    if init is None:
        rng = np.random.default_rng(config.seed)
        V = X[np.sort(rng.choice(N, size=c, replace=False))].copy()
    else:
        V = np.array(init, dtype=np.float64)
        if V.shape != (c, X.shape[1]):
            raise DimensionMismatch(f"init must have shape {(c, X.shape[1])}, got {V.shape}")
    U = update_memberships(X, V, m)
    losses = [fcm_loss(X, V, U, m)]
    history = [U] if record_history else []

    iterations = 0
    for iterations in range(1, config.max_iterations + 1):
        try:
            V = update_prototypes(X, U, m)
        except EmptyCluster as exc:
            V = _reseed_empty(X, V, exc.clusters)
        U_new = update_memberships(X, V, m)
        delta = float(np.max(np.abs(U_new - U)))
        U = U_new
        losses.append(fcm_loss(X, V, U, m))
        if record_history:
            history.append(U)
        if delta <= config.tolerance:
            break

    return FcmPartition(
        prototypes=V,
        memberships=U,
        final_loss=losses[-1],
        iterations_run=iterations,
        loss_history=tuple(losses),
        membership_history=tuple(history),
    )
