"""Cross-validated experiment runner.

An experiment is one dataset, one fold plan and a list of model variants
(order, rule count, penalties). Every (variant, fold) cell is fitted on the
training folds only and scored on both splits. Reports serialize to
deterministic JSON so identical configs give byte-identical files.

Config files are JSON objects with exactly these keys (optional ones marked):

.. code-block:: json

    {
      "name": "synthetic",                        (optional)
      "dataset": {"synthetic": {"count": 500, "seed": 0}}
                 | {"keel": "path/to/file.dat"},
      "metric": "RMSE" | "MSE" | "HalfMSE",
      "folds": 5,
      "base_seed": 0,
      "fuzzifier": 2.0,                           (optional)
      "alpha": 0.05,                              (optional)
      "friedman_critical_value": 2.48,            (optional)
      "variants": [
        {"label": "RSFRM", "order": 2, "clusters": 10,
         "penalties": [1e-8, 1e-6, 1e-4]}
      ]
    }

``penalties`` may be omitted (no regularization). Relative KEEL paths are
resolved against the config file's directory.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import logging
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataio import Dataset, FoldPlan, apply_normalizer, fit_normalizer, generate_synthetic, kfold_split, load_keel
from .exceptions import ConfigError, DegenerateLSSC, LabelMismatch, RSFRMError
from .fcm import FcmConfig, FcmPartition, fit_fcm
from .metrics import ErrorSummary, Metric, evaluate, summarize
from .model import INPUT_RANGE, PenaltyOrderWarning, PenaltySpec, RsfrmModel, fit_model, lssc
from .stats import ComparisonResult, compare_to_control, rank_table

log = logging.getLogger(__name__)

REPORT_FORMAT = "rsfrm-report/1"

# Default search grid for rule counts and penalty strengths.
GRID_CLUSTERS = (2, 4, 6, 8, 10)
GRID_LAMBDAS = (1e-8, 1e-6, 1e-4, 1e-2, 1e-1, 1e0, 1e1, 1e2, 1e3)


# --------------------------------------------------------------------------
# seeding

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix_seed(base: int, *keys: int) -> int:
    """Derive an independent 64-bit seed from ``base`` and integer keys."""
    h = _splitmix64(base & _MASK64)
    for k in keys:
        h = _splitmix64(h ^ (int(k) & _MASK64))
    return h


# --------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class VariantSpec:
    label: str
    order: int
    clusters: int
    penalties: PenaltySpec = field(default_factory=PenaltySpec)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "order": self.order,
            "clusters": self.clusters,
            "penalties": list(self.penalties.as_tuple()),
        }


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: dict
    metric: Metric
    folds: int
    base_seed: int
    variants: tuple
    name: str = ""
    fuzzifier: float = 2.0
    alpha: float = 0.05
    friedman_critical_value: float | None = None

    def __post_init__(self):
        if self.folds < 2:
            raise ConfigError("folds must be >= 2")
        if not self.variants:
            raise ConfigError("variant grid is empty")
        labels = [v.label for v in self.variants]
        if len(set(labels)) != len(labels):
            raise ConfigError("variant labels must be unique")
        if self.base_seed < 0:
            raise ConfigError("base_seed must be unsigned")
        if not self.fuzzifier > 1:
            raise ConfigError("fuzzifier must be > 1")
        if not 0 < self.alpha < 1:
            raise ConfigError("alpha must lie in (0, 1)")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "dataset": self.dataset,
            "metric": self.metric.value,
            "folds": self.folds,
            "base_seed": self.base_seed,
            "fuzzifier": self.fuzzifier,
            "alpha": self.alpha,
            "friedman_critical_value": self.friedman_critical_value,
            "variants": [v.to_dict() for v in self.variants],
        }


_CONFIG_KEYS = {"name", "dataset", "metric", "folds", "base_seed", "fuzzifier", "alpha",
                "friedman_critical_value", "variants"}
_REQUIRED_KEYS = {"dataset", "metric", "folds", "base_seed", "variants"}
_VARIANT_KEYS = {"label", "order", "clusters", "penalties"}


def _require_int(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{what} must be an integer, got {value!r}")
    return value


def _require_number(value, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{what} must be a number, got {value!r}")
    return float(value)


def _parse_dataset(doc, base_dir: Path | None) -> dict:
    if not isinstance(doc, dict) or len(doc) != 1:
        raise ConfigError("dataset must be an object with exactly one of 'keel' or 'synthetic'")
    (kind, value), = doc.items()
    if kind == "keel":
        if not isinstance(value, str):
            raise ConfigError("dataset.keel must be a path string")
        path = Path(value)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return {"keel": str(path)}
    if kind == "synthetic":
        if not isinstance(value, dict):
            raise ConfigError("dataset.synthetic must be an object")
        unknown = set(value) - {"count", "seed"}
        if unknown:
            raise ConfigError(f"unknown dataset.synthetic keys: {sorted(unknown)}")
        return {"synthetic": {
            "count": _require_int(value.get("count", 500), "dataset.synthetic.count"),
            "seed": _require_int(value.get("seed", 0), "dataset.synthetic.seed"),
        }}
    raise ConfigError(f"unknown dataset kind {kind!r}")


def _parse_variant(doc, i: int) -> VariantSpec:
    if not isinstance(doc, dict):
        raise ConfigError(f"variants[{i}] must be an object")
    unknown = set(doc) - _VARIANT_KEYS
    if unknown:
        raise ConfigError(f"variants[{i}]: unknown keys {sorted(unknown)}")
    missing = {"label", "order", "clusters"} - set(doc)
    if missing:
        raise ConfigError(f"variants[{i}]: missing keys {sorted(missing)}")
    if not isinstance(doc["label"], str) or not doc["label"]:
        raise ConfigError(f"variants[{i}].label must be a nonempty string")
    order = _require_int(doc["order"], f"variants[{i}].order")
    if order not in (0, 1, 2):
        raise ConfigError(f"variants[{i}].order must be 0, 1 or 2")
    clusters = _require_int(doc["clusters"], f"variants[{i}].clusters")
    if clusters < 1:
        raise ConfigError(f"variants[{i}].clusters must be >= 1")
    pen = doc.get("penalties", [0.0, 0.0, 0.0])
    if isinstance(pen, (int, float)) and not isinstance(pen, bool):
        pen = [pen] * 3
    if not isinstance(pen, list) or len(pen) != 3:
        raise ConfigError(f"variants[{i}].penalties must be a number or a list of three numbers")
    vals = [_require_number(p, f"variants[{i}].penalties") for p in pen]
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PenaltyOrderWarning)
            spec = PenaltySpec(*vals)
    except ValueError as exc:
        raise ConfigError(f"variants[{i}]: {exc}") from None
    return VariantSpec(doc["label"], order, clusters, spec)


def config_from_dict(doc, base_dir=None) -> ExperimentConfig:
    """Validate a config mapping; unknown or misspelled keys are rejected."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    missing = _REQUIRED_KEYS - set(doc)
    if missing:
        raise ConfigError(f"missing config keys: {sorted(missing)}")
    try:
        metric = Metric(doc["metric"])
    except ValueError:
        raise ConfigError(f"metric must be one of {[m.value for m in Metric]}") from None
    if not isinstance(doc["variants"], list):
        raise ConfigError("variants must be a list")
    crit = doc.get("friedman_critical_value")
    return ExperimentConfig(
        dataset=_parse_dataset(doc["dataset"], Path(base_dir) if base_dir is not None else None),
        metric=metric,
        folds=_require_int(doc["folds"], "folds"),
        base_seed=_require_int(doc["base_seed"], "base_seed"),
        variants=tuple(_parse_variant(v, i) for i, v in enumerate(doc["variants"])),
        name=str(doc.get("name", "")),
        fuzzifier=_require_number(doc.get("fuzzifier", 2.0), "fuzzifier"),
        alpha=_require_number(doc.get("alpha", 0.05), "alpha"),
        friedman_critical_value=None if crit is None else _require_number(crit, "friedman_critical_value"),
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    return config_from_dict(doc, base_dir=path.parent)


def load_dataset(config: ExperimentConfig) -> Dataset:
    if "keel" in config.dataset:
        return load_keel(config.dataset["keel"])
    syn = config.dataset["synthetic"]
    return generate_synthetic(syn["count"], syn["seed"])


def grid_variants(orders=(2,), clusters=GRID_CLUSTERS, lambdas=GRID_LAMBDAS, scheme="uniform"):
    """Enumerate variants over a parameter grid.

    ``scheme`` selects how penalties are drawn from ``lambdas``:
    ``"none"`` (no penalty), ``"uniform"`` (one value for all groups) or
    ``"exponential"`` (every strictly increasing triple).
    """
    if scheme == "none":
        penalties = [PenaltySpec()]
    elif scheme == "uniform":
        penalties = [PenaltySpec.uniform(l) for l in lambdas]
    elif scheme == "exponential":
        penalties = [PenaltySpec(*t) for t in itertools.combinations(sorted(lambdas), 3)]
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    out = []
    for order, c, pen in itertools.product(orders, clusters, penalties):
        lam = "/".join(f"{v:g}" for v in pen.as_tuple())
        out.append(VariantSpec(f"o{order}-c{c}-{pen.kind}-{lam}", order, c, pen))
    return out


# --------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class CellResult:
    fold: int
    train_error: float | None
    test_error: float | None
    lssc: float | None
    used_fallback: bool = False
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None

    def to_dict(self) -> dict:
        return {
            "fold": self.fold,
            "train_error": self.train_error,
            "test_error": self.test_error,
            "lssc": self.lssc,
            "used_fallback": self.used_fallback,
            "error": self.error,
        }


@dataclass(frozen=True)
class VariantResult:
    spec: VariantSpec
    cells: tuple
    metric: Metric

    @property
    def failed(self) -> bool:
        return any(c.failed for c in self.cells)

    def _summary(self, attr) -> ErrorSummary | None:
        if self.failed:
            return None
        return summarize([getattr(c, attr) for c in self.cells], self.metric)

    @property
    def train(self) -> ErrorSummary | None:
        return self._summary("train_error")

    @property
    def test(self) -> ErrorSummary | None:
        return self._summary("test_error")

    @property
    def lssc_summary(self) -> ErrorSummary | None:
        vals = [c.lssc for c in self.cells]
        if self.failed or any(v is None for v in vals):
            return None
        return summarize(vals, self.metric)


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    dataset_name: str
    n_patterns: int
    n_inputs: int
    fold_sizes: tuple
    variants: tuple

    @property
    def failed_cells(self) -> list[tuple[str, int]]:
        return [(v.spec.label, c.fold) for v in self.variants for c in v.cells if c.failed]

    @property
    def ok(self) -> bool:
        return not self.failed_cells

    def variant(self, label: str) -> VariantResult:
        for v in self.variants:
            if v.spec.label == label:
                return v
        raise KeyError(label)

    @property
    def best_label(self) -> str | None:
        """Variant with the smallest mean test error.

        Picking on test error mirrors how the reference tables report a
        single configuration; it is not a deployment protocol.
        """
        scored = [(v.test.mean, i) for i, v in enumerate(self.variants) if not v.failed]
        if not scored:
            return None
        return self.variants[min(scored)[1]].spec.label

    def to_dict(self) -> dict:
        variants = []
        for v in self.variants:
            tr, te, ls = v.train, v.test, v.lssc_summary
            variants.append({
                **v.spec.to_dict(),
                "cells": [c.to_dict() for c in v.cells],
                "train_mean": None if tr is None else tr.mean,
                "train_std": None if tr is None else tr.std,
                "test_mean": None if te is None else te.mean,
                "test_std": None if te is None else te.std,
                "lssc_mean": None if ls is None else ls.mean,
            })
        return {
            "format": REPORT_FORMAT,
            "config": self.config.to_dict(),
            "dataset": {"name": self.dataset_name, "patterns": self.n_patterns, "inputs": self.n_inputs},
            "fold_sizes": list(self.fold_sizes),
            "best_variant": self.best_label,
            "failed_cells": [list(fc) for fc in self.failed_cells],
            "variants": variants,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"


def report_from_dict(doc: dict) -> ExperimentReport:
    if doc.get("format") != REPORT_FORMAT:
        raise ValueError(f"unsupported report format {doc.get('format')!r}")
    config = config_from_dict(doc["config"])
    variants = []
    for v in doc["variants"]:
        spec = _parse_variant({k: v[k] for k in _VARIANT_KEYS}, 0)
        cells = tuple(CellResult(**c) for c in v["cells"])
        variants.append(VariantResult(spec, cells, config.metric))
    ds = doc["dataset"]
    return ExperimentReport(config, ds["name"], ds["patterns"], ds["inputs"],
                            tuple(doc["fold_sizes"]), tuple(variants))


def load_report(path) -> ExperimentReport:
    path = Path(path)
    if path.is_dir():
        path = path / "report.json"
    return report_from_dict(json.loads(path.read_text()))


# --------------------------------------------------------------------------
# running


def fcm_seed(base_seed: int, clusters: int, fold: int) -> int:
    """Seed of the FCM run shared by all variants with ``clusters`` rules on ``fold``."""
    return mix_seed(base_seed, clusters, fold)


def fit_cell(dataset: Dataset, train_idx, spec: VariantSpec, fuzzifier: float, seed: int,
             partition: FcmPartition | None = None) -> RsfrmModel:
    """Fit one variant on the given training rows only."""
    return fit_model(
        dataset.inputs[train_idx], dataset.targets[train_idx],
        clusters=spec.clusters, order=spec.order, penalties=spec.penalties,
        fuzzifier=fuzzifier, seed=seed, partition=partition,
    )


def run_experiment(config: ExperimentConfig, dataset: Dataset | None = None) -> ExperimentReport:
    """Run every (variant, fold) cell of ``config``.

    All variants share one fold plan seeded by ``base_seed``. The FCM
    partition of a fold depends only on the fold's training inputs, the
    rule count and a seed mixed from ``(base_seed, clusters, fold)``, so
    variants that differ only in order or penalties are fitted on the same
    partition and results do not depend on execution order. A failing cell
    is recorded and the remaining cells still run.
    """
    if dataset is None:
        dataset = load_dataset(config)
    plan: FoldPlan = kfold_split(dataset.n_patterns, config.folds, config.base_seed)
    splits = list(plan.splits())
    partitions: dict[tuple[int, int], FcmPartition] = {}

    def partition_for(fold: int, clusters: int) -> FcmPartition:
        key = (fold, clusters)
        if key not in partitions:
            train_idx = splits[fold][0]
            Z = apply_normalizer(fit_normalizer(dataset.inputs[train_idx], INPUT_RANGE),
                                 dataset.inputs[train_idx])
            cfg = FcmConfig(clusters, config.fuzzifier, seed=fcm_seed(config.base_seed, clusters, fold))
            partitions[key] = fit_fcm(Z, cfg)
        return partitions[key]

    results = []
    for spec in config.variants:
        cells = []
        for fold, (train_idx, test_idx) in enumerate(splits):
            try:
                part = partition_for(fold, spec.clusters)
                model = fit_cell(dataset, train_idx, spec, config.fuzzifier,
                                 fcm_seed(config.base_seed, spec.clusters, fold), part)
                y_tr, y_te = dataset.targets[train_idx], dataset.targets[test_idx]
                train_err = evaluate(config.metric, y_tr, model.predict(dataset.inputs[train_idx]))
                test_err = evaluate(config.metric, y_te, model.predict(dataset.inputs[test_idx]))
                if not (math.isfinite(train_err) and math.isfinite(test_err)):
                    raise ArithmeticError("non-finite error")
                try:
                    lssc_val = lssc(model)
                except DegenerateLSSC:
                    lssc_val = None
                cells.append(CellResult(fold, train_err, test_err, lssc_val, model.used_fallback))
            except (RSFRMError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
                log.warning("cell (%s, fold %d) failed: %s", spec.label, fold, exc)
                cells.append(CellResult(fold, None, None, None, False, f"{type(exc).__name__}: {exc}"))
        results.append(VariantResult(spec, tuple(cells), config.metric))

    return ExperimentReport(
        config=config,
        dataset_name=config.name or dataset.name,
        n_patterns=dataset.n_patterns,
        n_inputs=dataset.n_inputs,
        fold_sizes=tuple(int(s) for s in plan.sizes()),
        variants=tuple(results),
    )


# --------------------------------------------------------------------------
# output

SUMMARY_COLUMNS = ["variant", "order", "c", "lambda1", "lambda2", "lambda3",
                   "train_mean", "train_std", "test_mean", "test_std", "lssc_mean"]
LAMBDA_SWEEP_COLUMNS = ["variant", "order", "c", "lambda1", "lambda2", "lambda3",
                        "statistic", "mean", "std"]
COMPLEXITY_SWEEP_COLUMNS = ["family", "order", "lambda1", "lambda2", "lambda3", "c",
                            "statistic", "mean", "std"]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(float(v))
    return str(v)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def _stat_rows(v: VariantResult):
    for name, s in (("train", v.train), ("test", v.test), ("lssc", v.lssc_summary)):
        yield name, (None if s is None else s.mean), (None if s is None else s.std)


def summary_csv(report: ExperimentReport) -> str:
    rows = []
    for v in report.variants:
        tr, te, ls = v.train, v.test, v.lssc_summary
        rows.append([v.spec.label, v.spec.order, v.spec.clusters, *v.spec.penalties.as_tuple(),
                     tr and tr.mean, tr and tr.std, te and te.mean, te and te.std, ls and ls.mean])
    return _csv(SUMMARY_COLUMNS, rows)


def lambda_sweep_csv(report: ExperimentReport) -> str:
    """One row per (penalty configuration, statistic)."""
    rows = []
    for v in report.variants:
        for name, mean, std in _stat_rows(v):
            rows.append([v.spec.label, v.spec.order, v.spec.clusters, *v.spec.penalties.as_tuple(),
                         name, mean, std])
    return _csv(LAMBDA_SWEEP_COLUMNS, rows)


def complexity_sweep_csv(report: ExperimentReport) -> str:
    """Errors against rule count, grouped by (order, penalties) family."""
    families: dict[tuple, list[VariantResult]] = {}
    for v in report.variants:
        families.setdefault((v.spec.order, v.spec.penalties.as_tuple()), []).append(v)
    rows = []
    for (order, lam), members in families.items():
        fam = f"o{order}-" + "/".join(f"{x:g}" for x in lam)
        for v in sorted(members, key=lambda m: m.spec.clusters):
            for name, mean, std in _stat_rows(v):
                rows.append([fam, order, *lam, v.spec.clusters, name, mean, std])
    return _csv(COMPLEXITY_SWEEP_COLUMNS, rows)


def emit_report(report: ExperimentReport, destination) -> dict[str, Path]:
    """Write ``report.json``, ``summary.csv``, ``lambda_sweep.csv`` and ``complexity_sweep.csv``."""
    out = Path(destination)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "report.json": report.to_json(),
        "summary.csv": summary_csv(report),
        "lambda_sweep.csv": lambda_sweep_csv(report),
        "complexity_sweep.csv": complexity_sweep_csv(report),
    }
    written = {}
    for name, text in files.items():
        path = out / name
        path.write_text(text)
        written[name] = path
    return written


# --------------------------------------------------------------------------
# cross-dataset comparison


def compare_variants(reports, control: str, alpha: float = 0.05,
                     critical_value: float | None = None) -> ComparisonResult:
    """Rank variants by mean test error on each dataset and test against ``control``."""
    reports = list(reports)
    if not reports:
        raise LabelMismatch("no reports to compare")
    labels = [v.spec.label for v in reports[0].variants]
    for r in reports[1:]:
        if [v.spec.label for v in r.variants] != labels:
            raise LabelMismatch(f"report {r.dataset_name!r} has different variant labels")
    names, seen = [], {}
    for r in reports:
        k = seen[r.dataset_name] = seen.get(r.dataset_name, 0) + 1
        names.append(r.dataset_name if k == 1 else f"{r.dataset_name}#{k}")
    errors = []
    for r in reports:
        if not r.ok:
            raise RSFRMError(f"report {r.dataset_name!r} contains failed cells")
        errors.append([v.test.mean for v in r.variants])
    table = rank_table(errors, labels, names)
    return compare_to_control(table, control, alpha, critical_value)
