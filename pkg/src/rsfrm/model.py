"""Fuzzy rule-based regressor with quadratic consequents.

Each of the ``c`` rules owns a polynomial of order 0, 1 or 2 in the
inputs (min-max scaled onto [-1, 1]); its matching degree is the FCM membership of the
pattern. The model output is the membership-weighted sum of rule outputs.
Consequent coefficients are estimated in closed form under a grouped ridge
penalty: one weight for the constants, one for the linear terms, one for
the quadratic terms.

Column layout of the design matrix (and of the coefficient vector) is
term-major with the rule index varying fastest::

    [u_1 .. u_c,  x_1 u_1 .. x_1 u_c,  ...,  x_n x_n u_1 .. x_n x_n u_c]

with terms in :mod:`rsfrm.polynomial` canonical order.
"""

from __future__ import annotations

import json
import logging
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import numerics
from .dataio import Normalizer, apply_normalizer, fit_normalizer
from .exceptions import DegenerateLSSC, DimensionMismatch, NotPositiveDefinite
from .fcm import FcmConfig, fit_fcm, update_memberships
from .polynomial import TERM_LAYOUT_VERSION, TermGroup, check_order, expand_terms, term_count, term_groups

log = logging.getLogger(__name__)

MODEL_FORMAT = "rsfrm-model/1"
COLUMN_LAYOUT = f"term-major/rule-fastest;{TERM_LAYOUT_VERSION}"

# Normal-equation residual bound relative to max(1, ||phi^T g||).
RESIDUAL_TOLERANCE = 1e-8
# Centred scaling keeps the constant, linear and quadratic columns from being
# nearly collinear, which they are when every input is nonnegative.
INPUT_RANGE = (-1.0, 1.0)
_REFINEMENT_STEPS = 5
_EPS = np.finfo(np.float64).eps


class PenaltyOrderWarning(UserWarning):
    """Penalties are neither zero, uniform, nor strictly increasing."""


@dataclass(frozen=True)
class PenaltySpec:
    """Ridge weights for the constant, linear and quadratic coefficient groups.

    All zero gives plain least squares and three equal values give ordinary
    ridge. The intended exponential scheme has ``0 < lambda1 < lambda2 <
    lambda3``; other orderings are accepted with a :class:`PenaltyOrderWarning`.
    """

    lambda1: float = 0.0
    lambda2: float = 0.0
    lambda3: float = 0.0

    def __post_init__(self):
        vals = self.as_tuple()
        if not all(math.isfinite(v) and v >= 0 for v in vals):
            raise ValueError(f"penalties must be finite and nonnegative, got {vals}")
        if self.kind == "irregular":
            warnings.warn(
                f"penalties {vals} are not strictly increasing (0 < l1 < l2 < l3)",
                PenaltyOrderWarning,
                stacklevel=3,
            )

    @classmethod
    def uniform(cls, lam: float) -> "PenaltySpec":
        return cls(lam, lam, lam)

    def as_tuple(self) -> tuple[float, float, float]:
        return (float(self.lambda1), float(self.lambda2), float(self.lambda3))

    @property
    def kind(self) -> str:
        a, b, c = self.as_tuple()
        if a == b == c == 0:
            return "none"
        if a == b == c:
            return "uniform"
        if 0 < a < b < c:
            return "exponential"
        return "irregular"

    def for_group(self, group: TermGroup) -> float:
        return {
            TermGroup.CONSTANT: self.lambda1,
            TermGroup.LINEAR: self.lambda2,
            TermGroup.QUADRATIC: self.lambda3,
        }[group]


def build_design_matrix(inputs, memberships, order: int) -> np.ndarray:
    """Membership-weighted term matrix of shape ``(N, c * T)``."""
    order = check_order(order)
    X = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
    U = np.atleast_2d(np.asarray(memberships, dtype=np.float64))
    N = X.shape[0]
    if U.shape[1] != N:
        raise DimensionMismatch(f"memberships cover {U.shape[1]} patterns, inputs have {N}")
    sums = U.sum(axis=0)
    if np.any(np.abs(sums - 1.0) > 1e-6):
        raise ValueError("membership columns must sum to 1")
    terms = expand_terms(X, order)
    return (terms[:, :, None] * U.T[:, None, :]).reshape(N, -1)


def build_penalty_diagonal(c: int, n: int, order: int, penalties: PenaltySpec) -> np.ndarray:
    """Diagonal of the penalty matrix, aligned with :func:`build_design_matrix` columns."""
    per_term = np.array([penalties.for_group(g) for g in term_groups(n, order)], dtype=np.float64)
    return np.repeat(per_term, c)


@dataclass(frozen=True)
class CoefficientSolution:
    """Coefficients plus how they were obtained.

    ``used_fallback`` is True when the Cholesky route failed and the
    minimum-norm least-squares solution was returned instead.
    """

    coefficients: np.ndarray
    used_fallback: bool
    residual_norm: float
    refinement_steps: int = 0


def normal_equation_residual(phi, targets, diagonal, coefficients) -> np.ndarray:
    """``phi^T g - (phi^T phi + D) a`` accumulated in extended precision."""
    P = np.asarray(phi, dtype=np.longdouble)
    G = np.asarray(targets, dtype=np.longdouble)
    A = np.asarray(coefficients, dtype=np.longdouble)
    D = np.asarray(diagonal, dtype=np.longdouble)
    r = P.T @ (G - P @ A) - D * A
    return r.astype(np.float64)


def fit_coefficients(phi, targets, diagonal) -> CoefficientSolution:
    """Minimize ``||g - phi a||^2 + sum_j d_j a_j^2``.

    Solves ``(phi^T phi + D) a = phi^T g`` by Cholesky, then polishes the
    solution with iterative refinement whose residual is formed from ``phi``
    in extended precision. If the factorization fails or the refined
    residual stays above tolerance, falls back to the minimum-norm
    least-squares solution of the stacked system ``[phi; sqrt(D)]``.
    """
    phi = np.asarray(phi, dtype=np.float64)
    g = np.asarray(targets, dtype=np.float64)
    d = np.asarray(diagonal, dtype=np.float64)
    if phi.ndim != 2:
        raise DimensionMismatch(f"phi must be 2-D, got {phi.shape}")
    if g.shape != (phi.shape[0],):
        raise DimensionMismatch(f"targets length {g.shape} does not match {phi.shape[0]} rows")
    if d.shape != (phi.shape[1],):
        raise DimensionMismatch(f"diagonal length {d.shape} does not match {phi.shape[1]} columns")
    if np.any(d < 0):
        raise ValueError("penalty diagonal must be nonnegative")

    rhs = phi.T @ g
    scale = max(1.0, float(np.linalg.norm(rhs)))
    system = numerics.gram(phi) + np.diag(d)
    try:
        factor = numerics.cholesky(system)
        a = numerics.cholesky_solve(factor, rhs)
        r = normal_equation_residual(phi, g, d, a)
        steps = 0
        # Stop on the size of the correction, not the residual: with an
        # ill-conditioned system a tiny residual can hide a large error.
        while steps < _REFINEMENT_STEPS and np.any(r):
            delta = numerics.cholesky_solve(factor, r)
            a = a + delta
            r = normal_equation_residual(phi, g, d, a)
            steps += 1
            if np.linalg.norm(delta) <= _EPS * np.linalg.norm(a):
                break
        res = float(np.linalg.norm(r))
        if res <= RESIDUAL_TOLERANCE * scale:
            return CoefficientSolution(a, False, res, steps)
    except NotPositiveDefinite:
        pass

    log.info("normal equations singular or unstable; using minimum-norm least squares")
    stacked = np.vstack([phi, np.diag(np.sqrt(d))])
    a = numerics.min_norm_lstsq(stacked, np.concatenate([g, np.zeros(d.size)]))
    res = float(np.linalg.norm(normal_equation_residual(phi, g, d, a)))
    return CoefficientSolution(a, True, res, 0)


@dataclass(frozen=True)
class RsfrmModel:
    """A fitted model; everything needed to evaluate new inputs.

    ``prototypes`` live in the normalized input space.
    """

    order: int
    fuzzifier: float
    prototypes: np.ndarray
    coefficients: np.ndarray
    normalizer: Normalizer
    penalties: PenaltySpec = field(default_factory=PenaltySpec)
    used_fallback: bool = False
    column_layout: str = COLUMN_LAYOUT

    def __post_init__(self):
        expected = self.n_rules * term_count(self.n_inputs, self.order)
        if self.coefficients.shape != (expected,):
            raise DimensionMismatch(
                f"expected {expected} coefficients, got {self.coefficients.shape}"
            )
        if not np.all(np.isfinite(self.coefficients)):
            raise ValueError("coefficients must be finite")

    @property
    def n_rules(self) -> int:
        return self.prototypes.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.prototypes.shape[1]

    def rule_coefficients(self) -> np.ndarray:
        """Coefficients reshaped to ``(c, T)``: one row per rule."""
        return self.coefficients.reshape(-1, self.n_rules).T

    def predict(self, x):
        return predict(self, x)


def fit_model(
    inputs,
    targets,
    *,
    clusters: int,
    order: int = 2,
    penalties: PenaltySpec | None = None,
    fuzzifier: float = 2.0,
    seed: int = 0,
    fcm_max_iterations: int = 300,
    fcm_tolerance: float = 1e-6,
    input_range=INPUT_RANGE,
    partition=None,
) -> RsfrmModel:
    """Fit normalizer, FCM partition and consequent coefficients on training data.

    Inputs are min-max scaled onto ``input_range`` using training statistics;
    targets are left in their original units.

    ``partition`` may carry a precomputed :class:`~rsfrm.fcm.FcmPartition`
    of the *normalized* inputs (the harness reuses one partition across
    penalty settings); it must come from the same training inputs.
    """
    X = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
    g = np.asarray(targets, dtype=np.float64)
    if g.shape != (X.shape[0],):
        raise DimensionMismatch(f"targets shape {g.shape} does not match {X.shape[0]} patterns")
    order = check_order(order)
    penalties = penalties if penalties is not None else PenaltySpec()

    normalizer = fit_normalizer(X, input_range)
    Z = apply_normalizer(normalizer, X)
    if partition is None:
        config = FcmConfig(clusters, fuzzifier, fcm_max_iterations, fcm_tolerance, seed)
        partition = fit_fcm(Z, config)
    elif partition.memberships.shape != (clusters, X.shape[0]):
        raise DimensionMismatch("supplied partition does not match the training data")

    phi = build_design_matrix(Z, partition.memberships, order)
    diag = build_penalty_diagonal(clusters, X.shape[1], order, penalties)
    sol = fit_coefficients(phi, g, diag)
    return RsfrmModel(
        order=order,
        fuzzifier=float(fuzzifier),
        prototypes=np.array(partition.prototypes, dtype=np.float64),
        coefficients=sol.coefficients,
        normalizer=normalizer,
        penalties=penalties,
        used_fallback=sol.used_fallback,
    )


def predict(model: RsfrmModel, x):
    """Model output for one pattern (returns float) or a batch (returns array)."""
    arr = np.asarray(x, dtype=np.float64)
    single = arr.ndim == 1
    X = arr[None, :] if single else arr
    if X.ndim != 2 or X.shape[1] != model.n_inputs:
        raise DimensionMismatch(f"expected inputs with {model.n_inputs} variables, got shape {arr.shape}")
    Z = apply_normalizer(model.normalizer, X)
    U = update_memberships(Z, model.prototypes, model.fuzzifier)
    terms = expand_terms(Z, model.order)
    # rule outputs (N, c), then weight by matching degree
    rule_out = terms @ model.rule_coefficients().T
    out = np.sum(rule_out * U.T, axis=1)
    return float(out[0]) if single else out


def lssc(model: RsfrmModel) -> float:
    """Natural log of the summed squares of all non-constant coefficients."""
    total = float(np.sum(model.coefficients[model.n_rules:] ** 2))
    if total == 0.0:
        raise DegenerateLSSC("all non-constant coefficients are zero")
    return math.log(total)


# --------------------------------------------------------------------------
# serialization


def model_to_dict(model: RsfrmModel) -> dict:
    return {
        "format": MODEL_FORMAT,
        "column_layout": model.column_layout,
        "order": model.order,
        "c": model.n_rules,
        "n": model.n_inputs,
        "m": model.fuzzifier,
        "prototypes": model.prototypes.ravel().tolist(),
        "coefficients": model.coefficients.tolist(),
        "normalization": {
            "offset": model.normalizer.offset.tolist(),
            "scale": model.normalizer.scale.tolist(),
            "shift": model.normalizer.shift.tolist(),
        },
        "penalties": list(model.penalties.as_tuple()),
        "used_fallback": model.used_fallback,
    }


def model_from_dict(doc: dict) -> RsfrmModel:
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError(f"unsupported model format {doc.get('format')!r}")
    if doc.get("column_layout") != COLUMN_LAYOUT:
        raise ValueError(f"unsupported column layout {doc.get('column_layout')!r}")
    c, n = int(doc["c"]), int(doc["n"])
    norm = doc["normalization"]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PenaltyOrderWarning)
        penalties = PenaltySpec(*doc["penalties"])
    return RsfrmModel(
        order=int(doc["order"]),
        fuzzifier=float(doc["m"]),
        prototypes=np.array(doc["prototypes"], dtype=np.float64).reshape(c, n),
        coefficients=np.array(doc["coefficients"], dtype=np.float64),
        normalizer=Normalizer(
            offset=np.array(norm["offset"], dtype=np.float64),
            scale=np.array(norm["scale"], dtype=np.float64),
            shift=np.array(norm["shift"], dtype=np.float64),
        ),
        penalties=penalties,
        used_fallback=bool(doc.get("used_fallback", False)),
    )


def save_model(model: RsfrmModel, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n")


def load_model(path) -> RsfrmModel:
    return model_from_dict(json.loads(Path(path).read_text()))
