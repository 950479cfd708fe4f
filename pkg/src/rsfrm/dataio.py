"""Datasets: the two-variable benchmark surface, KEEL files, scaling and folds."""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import NonNumericAttribute, ParseError, TooFewPatterns

NUMERIC_TYPES = {"real", "integer", "numeric"}


@dataclass(frozen=True)
class Dataset:
    name: str
    inputs: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.inputs, dtype=np.float64)
        y = np.asarray(self.targets, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise ValueError(f"inputs must be an N x n matrix with N, n >= 1, got {X.shape}")
        if y.shape != (X.shape[0],):
            raise ValueError(f"targets shape {y.shape} does not match {X.shape[0]} patterns")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ValueError("dataset contains non-finite values")
        object.__setattr__(self, "inputs", X)
        object.__setattr__(self, "targets", y)

    @property
    def n_patterns(self) -> int:
        return self.inputs.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.inputs.shape[1]

    def subset(self, index) -> "Dataset":
        return Dataset(self.name, self.inputs[index], self.targets[index])


# --------------------------------------------------------------------------
# synthetic surface


def synthetic_function(x1, x2):
    """``1.9 * (1.35 + exp(x1) * exp(x2) * sin(13 (x2 - 0.6)^2) * sin(7 x1))``."""
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    return 1.9 * (1.35 + np.exp(x1) * np.exp(x2) * np.sin(13.0 * (x2 - 0.6) ** 2) * np.sin(7.0 * x1))


def generate_synthetic(count: int = 500, seed: int = 0) -> Dataset:
    """Sample ``count`` points uniformly on the unit square."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    X = rng.uniform(0.0, 1.0, size=(count, 2))
    return Dataset("synthetic", X, synthetic_function(X[:, 0], X[:, 1]))


def write_synthetic_csv(dataset: Dataset, path) -> None:
    """Write ``x1,x2,y`` rows with 17 significant digits."""
    with open(path, "w", newline="") as fh:
        fh.write("x1,x2,y\n")
        for (a, b), y in zip(dataset.inputs, dataset.targets):
            fh.write(f"{a:.17g},{b:.17g},{y:.17g}\n")


def read_synthetic_csv(path, name: str = "synthetic") -> Dataset:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [h.strip() for h in rows[0]] != ["x1", "x2", "y"]:
        raise ParseError("expected header 'x1,x2,y'", 1)
    try:
        data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=np.float64)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    return Dataset(name, data[:, :2], data[:, 2])


# --------------------------------------------------------------------------
# KEEL


_ATTR_RE = re.compile(r"^@attribute\s+('[^']*'|\S+)\s*(.*)$", re.IGNORECASE)


def _attr_type(spec: str) -> str:
    spec = spec.strip()
    if spec.startswith("{"):
        return "nominal"
    word = spec.split("[", 1)[0].strip().lower()
    return word or "real"


def _name_list(rest: str) -> list[str]:
    return [t.strip().strip("'") for t in rest.split(",") if t.strip()]


def load_keel(path) -> Dataset:
    """Read a numeric KEEL ``.dat`` regression file.

    The attribute named by ``@outputs`` is the target (the last attribute
    when ``@outputs`` is absent); the remaining attributes, in declaration
    order, are the inputs. Header keywords are case-insensitive and lines
    starting with ``%`` are comments.
    """
    path = Path(path)
    relation = path.stem
    attrs: list[tuple[str, str, int]] = []
    inputs_decl: list[str] | None = None
    outputs_decl: list[str] | None = None
    rows: list[list[float]] = []
    in_data = False

    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("%"):
                continue
            if in_data:
                fields = [f.strip() for f in line.split(",")]
                if len(fields) != len(attrs):
                    raise ParseError(f"expected {len(attrs)} fields, found {len(fields)}", lineno)
                try:
                    values = [float(f) for f in fields]
                except ValueError:
                    bad = next(f for f in fields if not _is_float(f))
                    raise ParseError(f"non-numeric or missing value {bad!r}", lineno) from None
                if not all(math.isfinite(v) for v in values):
                    raise ParseError("non-finite value", lineno)
                rows.append(values)
                continue
            if not line.startswith("@"):
                raise ParseError(f"unexpected content before @data: {line[:40]!r}", lineno)
            keyword = line.split(None, 1)[0].lower()
            rest = line.split(None, 1)[1] if " " in line or "\t" in line else ""
            if keyword == "@relation":
                relation = rest.strip().strip("'") or relation
            elif keyword == "@attribute":
                match = _ATTR_RE.match(line)
                if not match:
                    raise ParseError("malformed @attribute", lineno)
                name = match.group(1).strip("'")
                kind = _attr_type(match.group(2))
                if kind not in NUMERIC_TYPES:
                    raise NonNumericAttribute(f"attribute {name!r} has unsupported type {kind!r}", lineno)
                attrs.append((name, kind, lineno))
            elif keyword == "@inputs":
                inputs_decl = _name_list(rest)
            elif keyword in ("@outputs", "@output"):
                outputs_decl = _name_list(rest)
            elif keyword == "@data":
                if not attrs:
                    raise ParseError("@data before any @attribute", lineno)
                in_data = True
            else:
                raise ParseError(f"unknown header keyword {keyword!r}", lineno)

    if not in_data:
        raise ParseError("missing @data section")
    if not rows:
        raise ParseError("no data rows")

    names = [a[0] for a in attrs]
    if outputs_decl is None:
        outputs_decl = [names[-1]]
    if len(outputs_decl) != 1:
        raise ParseError(f"exactly one output attribute supported, got {outputs_decl}")
    for name in outputs_decl + (inputs_decl or []):
        if name not in names:
            raise ParseError(f"declared attribute {name!r} was never defined")
    target = names.index(outputs_decl[0])
    if inputs_decl is None:
        input_cols = [i for i in range(len(names)) if i != target]
    else:
        input_cols = [names.index(nm) for nm in inputs_decl]
        if target in input_cols:
            raise ParseError(f"attribute {outputs_decl[0]!r} is both input and output")
    if not input_cols:
        raise ParseError("no input attributes")

    table = np.array(rows, dtype=np.float64)
    return Dataset(relation, table[:, input_cols], table[:, target])


def _is_float(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def save_keel(dataset: Dataset, path, input_names=None, output_name: str = "y") -> None:
    """Write ``dataset`` as a KEEL file that :func:`load_keel` reads back exactly."""
    n = dataset.n_inputs
    input_names = list(input_names) if input_names is not None else [f"x{j + 1}" for j in range(n)]
    if len(input_names) != n:
        raise ValueError(f"need {n} input names, got {len(input_names)}")
    table = np.column_stack([dataset.inputs, dataset.targets])
    lines = [f"@relation {dataset.name}"]
    for j, name in enumerate(input_names + [output_name]):
        col = table[:, j]
        lines.append(f"@attribute {name} real [{float(col.min())!r}, {float(col.max())!r}]")
    lines.append("@inputs " + ", ".join(input_names))
    lines.append(f"@outputs {output_name}")
    lines.append("@data")
    lines.extend(",".join(repr(float(v)) for v in row) for row in table)
    Path(path).write_text("\n".join(lines) + "\n")


# --------------------------------------------------------------------------
# scaling


@dataclass(frozen=True)
class Normalizer:
    """Per-variable affine map ``(x - offset) / scale + shift``.

    Non-constant variables map their training range onto the target
    interval; constant variables keep unit scale and sit at its midpoint.
    """

    offset: np.ndarray
    scale: np.ndarray
    shift: np.ndarray

    def apply(self, inputs) -> np.ndarray:
        return apply_normalizer(self, inputs)

    def invert(self, scaled) -> np.ndarray:
        Z = np.asarray(scaled, dtype=np.float64)
        return (Z - self.shift) * self.scale + self.offset


def fit_normalizer(train_inputs, feature_range=(0.0, 1.0)) -> Normalizer:
    """Min-max scaling fitted on training inputs only.

    Test values outside the training range extrapolate affinely; nothing is
    clipped.
    """
    X = np.atleast_2d(np.asarray(train_inputs, dtype=np.float64))
    if X.shape[0] == 0:
        raise ValueError("cannot fit a normalizer on zero patterns")
    low, high = (float(v) for v in feature_range)
    if not high > low:
        raise ValueError(f"feature_range must be increasing, got {feature_range}")
    lo = X.min(axis=0)
    span = X.max(axis=0) - lo
    constant = span == 0.0
    return Normalizer(
        offset=lo,
        scale=np.where(constant, 1.0, span / (high - low)),
        shift=np.where(constant, 0.5 * (low + high), low),
    )


def apply_normalizer(params: Normalizer, inputs) -> np.ndarray:
    X = np.asarray(inputs, dtype=np.float64)
    if X.shape[-1] != params.offset.shape[0]:
        raise ValueError(f"expected {params.offset.shape[0]} variables, got {X.shape[-1]}")
    return (X - params.offset) / params.scale + params.shift


# --------------------------------------------------------------------------
# folds


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignments: np.ndarray

    def test_index(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)

    def train_index(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)

    def splits(self):
        for fold in range(self.k):
            yield self.train_index(fold), self.test_index(fold)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignments, minlength=self.k)


def kfold_split(n_patterns: int, k: int, seed: int) -> FoldPlan:
    """Shuffle with ``default_rng(seed)`` and deal patterns round-robin into ``k`` folds."""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if n_patterns < k:
        raise TooFewPatterns(f"{n_patterns} patterns cannot fill {k} folds")
    order = np.random.default_rng(seed).permutation(n_patterns)
    assignments = np.empty(n_patterns, dtype=np.int64)
    assignments[order] = np.arange(n_patterns) % k
    return FoldPlan(k, assignments)
