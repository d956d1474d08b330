"""Report generation module"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

import numpy as np
import pandas as pd

from src.evaluation.evaluator import STATISTICS, ValidationStats

logger = logging.getLogger(__name__)

# Posterior-mean parameter columns carried into the report when a model has them
TABLE_PARAMETERS = ["tau", "lambda", "lambda1", "lambda2", "kappa", "phi",
                    "sigma_eps", "sigma_f", "stn", "log_posterior"]

COVERAGE_NOMINAL = 0.95
COMPACT_STATISTICS = ("rmse", "neg_ppld")


@dataclass
class SubsetResult:
    """Validation outcome of one (subset, model, input) combination"""
    h: int
    model: str
    variable: str
    stats: Optional[ValidationStats] = None
    params: Dict[str, float] = field(default_factory=dict)
    status: str = "completed"
    error: str = ""

    def to_dict(self) -> Dict[str, Any]:
        row: Dict[str, Any] = {"h": self.h, "variable": self.variable, "model": self.model,
                               "status": self.status}
        stats = self.stats.to_dict() if self.stats else {name: np.nan for name in STATISTICS}
        row.update(stats)
        row.update({name: self.params.get(name, np.nan) for name in TABLE_PARAMETERS})
        row["error"] = self.error
        return row


@dataclass
class ValidationReport:
    """Across-subset means and standard errors per (input, model)"""
    table: pd.DataFrame
    subsets: pd.DataFrame

    def compact(self, statistic: str) -> pd.DataFrame:
        """Models by inputs matrix of one statistic's mean, with a row-wise Mean column"""
        matrix = self.table.pivot(index="model", columns="variable", values=f"{statistic}_mean")
        matrix = matrix.reindex(index=pd.unique(self.table["model"]),
                                columns=pd.unique(self.table["variable"]))
        matrix["Mean"] = matrix.mean(axis=1)
        return matrix


def _standard_error(values: np.ndarray) -> float:
    values = values[np.isfinite(values)]
    if values.size < 2:
        return float("nan")
    return float(np.std(values, ddof=1) / np.sqrt(values.size))


def aggregate(results: List[SubsetResult], model_order: Optional[List[str]] = None) -> ValidationReport:
    """
    Mean over subsets and its standard error sd / sqrt(H)

    Failed combinations are excluded; a single subset leaves the SE undefined (NaN).
    """
    subsets = pd.DataFrame([r.to_dict() for r in results])
    completed = subsets[subsets["status"] == "completed"] if not subsets.empty else subsets
    rows = []
    for (variable, model), group in completed.groupby(["variable", "model"], sort=False):
        row: Dict[str, Any] = {"variable": variable, "model": model, "n_subsets": len(group)}
        for name in list(STATISTICS) + ["neg_ppld_mean_log"] + TABLE_PARAMETERS:
            values = group[name].to_numpy(dtype=float)
            if name in TABLE_PARAMETERS and not np.isfinite(values).any():
                continue
            row[f"{name}_mean"] = float(np.nanmean(values)) if np.isfinite(values).any() else np.nan
            row[f"{name}_se"] = _standard_error(values)
        row["se_defined"] = len(group) >= 2
        rows.append(row)

    table = pd.DataFrame(rows)
    if not table.empty:
        if model_order:
            rank = {name: i for i, name in enumerate(model_order)}
            table = table.sort_values(["variable", "model"], key=lambda s: s.map(rank) if s.name == "model" else s,
                                      kind="stable").reset_index(drop=True)
        table = tag_best_in_class(table)
    return ValidationReport(table, subsets)


def tag_best_in_class(table: pd.DataFrame) -> pd.DataFrame:
    """
    Per input and statistic, mark the best model and every model within two
    combined standard errors of it

    Lower is better for losses, higher for r2, closest to 0.95 for coverage.
    """
    table = table.copy()
    for statistic in STATISTICS:
        column = f"{statistic}_best"
        table[column] = False
        for _, group in table.groupby("variable", sort=False):
            means = group[f"{statistic}_mean"].to_numpy(dtype=float)
            errors = np.nan_to_num(group[f"{statistic}_se"].to_numpy(dtype=float), nan=0.0)
            if statistic == "coverage95":
                score = np.abs(means - COVERAGE_NOMINAL)
            elif statistic == "r2":
                score = -means
            else:
                score = means
            if not np.isfinite(score).any():
                continue
            best = int(np.nanargmin(score))
            tolerance = 2.0 * np.sqrt(errors ** 2 + errors[best] ** 2)
            tagged = np.isfinite(score) & (score - score[best] <= tolerance)
            table.loc[group.index, column] = tagged
    return table


class ReportGenerator:
    """Collects subset results and writes the validation report files"""

    def __init__(self, output_dir: str, header_lines: Iterable[str] = (),
                 model_order: Optional[List[str]] = None):
        self.output_dir = Path(output_dir)
        self.header_lines = list(header_lines)
        self.model_order = model_order
        self.results: List[SubsetResult] = []

    def add_result(self, result: SubsetResult):
        self.results.append(result)

    def add_results(self, results: List[SubsetResult]):
        self.results.extend(results)

    def calculate_metrics(self) -> ValidationReport:
        return aggregate(self.results, self.model_order)

    def _write_csv(self, frame: pd.DataFrame, name: str, index: bool = False) -> Path:
        path = self.output_dir / name
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            for line in self.header_lines:
                f.write(f"# {line}\n")
            frame.to_csv(f, index=index, float_format="%.10g")
        logger.info(f"Wrote {path}")
        return path

    def save_csv(self) -> List[Path]:
        """Write subset_stats.csv, report.csv and compact.csv"""
        if not self.results:
            logger.warning("No validation results to save")
            return []
        report = self.calculate_metrics()
        paths = [self._write_csv(report.subsets, "subset_stats.csv")]
        if report.table.empty:
            logger.warning("Every combination failed; no report table written")
            return paths
        paths.append(self._write_csv(report.table, "report.csv"))
        compact = pd.concat(
            {statistic: report.compact(statistic) for statistic in COMPACT_STATISTICS},
            names=["statistic", "model"],
        )
        paths.append(self._write_csv(compact, "compact.csv", index=True))
        return paths

    def print_summary(self):
        """Print the per-input means with standard errors"""
        report = self.calculate_metrics()
        print("\n" + "=" * 70)
        print(" " * 24 + "VALIDATION SUMMARY")
        print("=" * 70)
        if report.table.empty:
            print("No completed combinations")
        else:
            columns = ["variable", "model", "n_subsets"] + [
                c for name in STATISTICS for c in (f"{name}_mean", f"{name}_se")
            ]
            print(report.table[columns].to_string(index=False, float_format=lambda v: f"{v:.4f}"))
        failed = [r for r in self.results if r.status != "completed"]
        if failed:
            print("-" * 70)
            for r in failed:
                print(f"FAILED h={r.h} {r.variable}/{r.model}: {r.error}")
        print("=" * 70)

    def save_detailed_report(self, metadata: Optional[Dict[str, Any]] = None) -> Path:
        """Save the full report as JSON"""
        report = self.calculate_metrics()
        payload = {
            **(metadata or {}),
            "report": json.loads(report.table.to_json(orient="records")),
            "subsets": json.loads(report.subsets.to_json(orient="records")),
        }
        path = self.output_dir / "validation_detailed.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, ensure_ascii=False, indent=2)
        logger.info(f"Wrote {path}")
        return path
