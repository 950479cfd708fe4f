"""Nonparametric comparison of several models over several datasets.

Average ranks feed the Friedman statistic (and its F-distributed variant);
the Bonferroni-Dunn critical difference then decides which models differ
significantly from a control. See Demsar (2006), JMLR 7:1-30.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as _st

from .exceptions import DegenerateStatistic, LabelMismatch


def rank_row(errors) -> np.ndarray:
    """Ascending ranks (1 = smallest error), ties get the average rank."""
    e = np.asarray(errors, dtype=np.float64)
    if e.ndim != 1 or not np.all(np.isfinite(e)):
        raise ValueError("errors must be a finite 1-D sequence")
    return _st.rankdata(e, method="average")


@dataclass(frozen=True)
class RankTable:
    models: tuple
    datasets: tuple
    errors: np.ndarray
    ranks: np.ndarray
    avg_ranks: np.ndarray


def rank_table(errors, models, datasets) -> RankTable:
    """Rank a ``D x M`` error matrix row by row."""
    E = np.asarray(errors, dtype=np.float64)
    models, datasets = tuple(models), tuple(datasets)
    if E.shape != (len(datasets), len(models)):
        raise LabelMismatch(f"error matrix {E.shape} does not match {len(datasets)} x {len(models)} labels")
    if len(set(models)) != len(models):
        raise LabelMismatch("model labels must be unique")
    R = np.vstack([rank_row(row) for row in E]) if E.size else np.zeros_like(E)
    return RankTable(models, datasets, E, R, R.mean(axis=0))


@dataclass(frozen=True)
class FriedmanResult:
    chi_squared: float
    f_statistic: float
    df1: int
    df2: int


def friedman(ranks, n_datasets: int | None = None) -> FriedmanResult:
    """Friedman chi-square and Iman-Davenport F statistic.

    Parameters
    ----------
    ranks : array_like
        Either the length-M vector of average ranks (then ``n_datasets`` is
        required) or a full ``D x M`` rank matrix.
    n_datasets : int, optional
        Number of datasets D the averages were taken over.

    Notes
    -----
    Significance is not decided here; compare ``f_statistic`` with the
    critical value of F(df1, df2) at the chosen level.
    """
    R = np.asarray(ranks, dtype=np.float64)
    if R.ndim == 2:
        if n_datasets is not None and n_datasets != R.shape[0]:
            raise ValueError("n_datasets disagrees with the rank matrix")
        n_datasets = R.shape[0]
        R = R.mean(axis=0)
    if n_datasets is None:
        raise ValueError("n_datasets is required with average ranks")
    M, D = R.size, int(n_datasets)
    if M < 2 or D < 2:
        raise ValueError(f"need at least 2 models and 2 datasets, got M={M}, D={D}")
    chi2 = 12.0 * D / (M * (M + 1)) * (math.fsum(R * R) - M * (M + 1) ** 2 / 4.0)
    denom = D * (M - 1) - chi2
    if denom == 0:
        raise DegenerateStatistic("chi-square equals D(M-1); F statistic undefined")
    f_stat = (D - 1) * chi2 / denom
    return FriedmanResult(chi2, f_stat, M - 1, (M - 1) * (D - 1))


def bonferroni_dunn_cd(n_models: int, n_datasets: int, alpha: float = 0.05) -> float:
    """Critical difference of average ranks against a single control model.

    ``q`` is the two-tailed standard-normal quantile at level
    ``alpha / (M - 1)``.
    """
    if n_models < 2 or n_datasets < 1:
        raise ValueError("need M >= 2 and D >= 1")
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    q = _st.norm.ppf(1.0 - alpha / (2.0 * (n_models - 1)))
    return float(q * math.sqrt(n_models * (n_models + 1) / (6.0 * n_datasets)))


@dataclass(frozen=True)
class ControlComparison:
    model: str
    avg_rank: float
    diff_vs_control: float
    exceeds_cd: bool


@dataclass(frozen=True)
class ComparisonResult:
    table: RankTable
    control: str
    friedman: FriedmanResult | None
    critical_value: float | None
    cd: float
    alpha: float
    rows: tuple

    @property
    def rejects_null(self) -> bool | None:
        if self.friedman is None or self.critical_value is None:
            return None
        return self.friedman.f_statistic > self.critical_value

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["model", "avg_rank", "diff_vs_control", "exceeds_cd"])
        for r in self.rows:
            w.writerow([r.model, repr(r.avg_rank), repr(r.diff_vs_control), str(r.exceeds_cd).lower()])
        return buf.getvalue()

    def to_dict(self) -> dict:
        fr = self.friedman
        return {
            "models": list(self.table.models),
            "datasets": list(self.table.datasets),
            "errors": self.table.errors.tolist(),
            "ranks": self.table.ranks.tolist(),
            "avg_ranks": self.table.avg_ranks.tolist(),
            "control": self.control,
            "alpha": self.alpha,
            "cd": self.cd,
            "friedman": None if fr is None else {
                "chi_squared": fr.chi_squared,
                "f_statistic": fr.f_statistic,
                "df1": fr.df1,
                "df2": fr.df2,
            },
            "critical_value": self.critical_value,
            "rejects_null": self.rejects_null,
            "rows": [
                {"model": r.model, "avg_rank": r.avg_rank,
                 "diff_vs_control": r.diff_vs_control, "exceeds_cd": r.exceeds_cd}
                for r in self.rows
            ],
        }


def compare_to_control(table: RankTable, control: str, alpha: float = 0.05,
                       critical_value: float | None = None) -> ComparisonResult:
    """Friedman statistics plus per-model Bonferroni-Dunn verdicts.

    ``diff_vs_control`` is ``avg_rank(model) - avg_rank(control)``, so a
    positive value means the control ranks better.
    """
    if control not in table.models:
        raise LabelMismatch(f"control {control!r} not among models {table.models}")
    M, D = len(table.models), len(table.datasets)
    try:
        fr = friedman(table.ranks) if D >= 2 else None
    except DegenerateStatistic:
        fr = None
    cd = bonferroni_dunn_cd(M, D, alpha)
    ref = table.avg_ranks[table.models.index(control)]
    rows = []
    for name, r in zip(table.models, table.avg_ranks):
        diff = float(r - ref)
        rows.append(ControlComparison(name, float(r), diff, name != control and diff > cd))
    return ComparisonResult(table, control, fr, critical_value, cd, alpha, tuple(rows))
