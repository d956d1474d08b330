"""Convergence and efficiency diagnostics for one chain"""

import logging
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional

import numpy as np

from src.errors import DataError
from src.inference.samples import PosteriorSample
from src.models.base import BaseKernelModel

logger = logging.getLogger(__name__)


def batch_means_variance(series: np.ndarray) -> float:
    """
    Batch-means estimate of the asymptotic variance (spectral density at zero)

    Batches have size floor(sqrt(n)); trailing draws that do not fill a batch are dropped.
    """
    series = np.asarray(series, dtype=float)
    n = series.size
    b = int(np.floor(np.sqrt(n)))
    a = n // b if b > 0 else 0
    if a < 2:
        raise DataError(f"Batch means need at least 2 batches, series has {n} draws")
    means = series[:a * b].reshape(a, b).mean(axis=1)
    return float(b * np.sum((means - means.mean()) ** 2) / (a - 1))


def mcse(series: np.ndarray) -> float:
    """Monte Carlo standard error of the mean by batch means"""
    series = np.asarray(series, dtype=float)
    b = int(np.floor(np.sqrt(series.size)))
    a = series.size // b if b > 0 else 0
    return float(np.sqrt(batch_means_variance(series) / max(a * b, 1)))


def geweke(series: np.ndarray, frac_a: float = 0.1, frac_b: float = 0.5) -> float:
    """
    Geweke z-score comparing the first frac_a and last frac_b of the chain

    Returns NaN when both windows have zero variance.
    """
    series = np.asarray(series, dtype=float)
    if series.size < 20:
        raise DataError(f"Geweke diagnostic needs at least 20 draws, got {series.size}")
    if not (0 < frac_a < 1 and 0 < frac_b < 1 and frac_a + frac_b <= 1):
        raise DataError(f"Invalid Geweke windows: {frac_a}, {frac_b}")
    first = series[:max(int(frac_a * series.size), 2)]
    last = series[series.size - max(int(frac_b * series.size), 2):]
    var_first = _window_mean_variance(first)
    var_last = _window_mean_variance(last)
    if var_first + var_last <= 0:
        return float("nan")
    return float((first.mean() - last.mean()) / np.sqrt(var_first + var_last))


def _window_mean_variance(window: np.ndarray) -> float:
    if window.size >= 4:
        return batch_means_variance(window) / window.size
    return float(np.var(window, ddof=1) / window.size)


@dataclass
class QuantityDiagnostics:
    label: str
    mean: float
    sd: float
    mcse: float
    geweke_z: float
    geweke_ok: Optional[bool]
    mcse_ok: Optional[bool]


@dataclass
class DiagnosticsReport:
    """Per-quantity diagnostics of the monitored weights and sampler health"""
    quantities: List[QuantityDiagnostics]
    divergences: int
    treedepth_hits: int
    mean_accept_stat: float
    step_size: float
    geweke_threshold: float = 3.0
    mcse_ratio: float = 0.1
    sampler: str = "nuts"

    @property
    def undefined(self) -> List[str]:
        """Quantities whose Geweke z is undefined (constant chains)"""
        return [q.label for q in self.quantities if q.geweke_ok is None]

    @property
    def passed(self) -> bool:
        return (
            self.divergences == 0
            and all(q.geweke_ok is not False for q in self.quantities)
            and all(q.mcse_ok is not False for q in self.quantities)
        )

    def failures(self) -> List[str]:
        messages = []
        if self.divergences:
            messages.append(f"{self.divergences} divergent transition(s)")
        if self.treedepth_hits:
            messages.append(f"{self.treedepth_hits} draw(s) hit the maximum tree depth")
        messages += [f"|geweke z| > {self.geweke_threshold} for {q.label}" for q in self.quantities if q.geweke_ok is False]
        messages += [f"mcse >= {self.mcse_ratio} sd for {q.label}" for q in self.quantities if q.mcse_ok is False]
        return messages

    def to_dict(self) -> Dict:
        return {
            "passed": self.passed,
            "divergences": self.divergences,
            "treedepth_hits": self.treedepth_hits,
            "mean_accept_stat": self.mean_accept_stat,
            "step_size": self.step_size,
            "sampler": self.sampler,
            "geweke_threshold": self.geweke_threshold,
            "mcse_ratio": self.mcse_ratio,
            "failures": self.failures(),
            "undefined": self.undefined,
            "quantities": [_json_safe(asdict(q)) for q in self.quantities],
        }


def _json_safe(record: Dict) -> Dict:
    return {k: (None if isinstance(v, float) and not np.isfinite(v) else v) for k, v in record.items()}


def monitored_draws(sample: PosteriorSample, model: BaseKernelModel) -> np.ndarray:
    """M x n_quantities matrix of the model's relevance weights per draw"""
    n_kernel = model.n_kernel
    return np.array([model.monitored_weights(row[:n_kernel]) for row in sample.draws])


def diagnose(sample: PosteriorSample, model: BaseKernelModel, geweke_threshold: float = 3.0,
             mcse_ratio: float = 0.1) -> DiagnosticsReport:
    """
    Diagnostics of the monitored weights

    Args:
        sample: post-warmup draws
        model: model the sample belongs to
        geweke_threshold: largest acceptable |z|
        mcse_ratio: largest acceptable mcse / posterior sd

    Returns:
        DiagnosticsReport
    """
    weights = monitored_draws(sample, model)
    quantities = []
    for label, series in zip(model.monitored_labels(), weights.T):
        sd = float(np.std(series, ddof=1))
        error = mcse(series)
        z = geweke(series)
        quantities.append(QuantityDiagnostics(
            label=label,
            mean=float(series.mean()),
            sd=sd,
            mcse=error,
            geweke_z=z,
            geweke_ok=None if np.isnan(z) else bool(abs(z) <= geweke_threshold),
            mcse_ok=None if sd == 0 else bool(error < mcse_ratio * sd),
        ))
    report = DiagnosticsReport(
        quantities=quantities,
        divergences=sample.divergences,
        treedepth_hits=sample.treedepth_hits,
        mean_accept_stat=float(np.mean(sample.accept_stats)),
        step_size=float(sample.step_size),
        geweke_threshold=geweke_threshold,
        mcse_ratio=mcse_ratio,
        sampler=sample.sampler,
    )
    if not report.passed:
        logger.warning(f"{model.name}: diagnostics failed: {'; '.join(report.failures())}")
    return report


def weight_summary(sample: PosteriorSample, model: BaseKernelModel) -> Dict[str, np.ndarray]:
    """Posterior mean and 2.5% / 97.5% quantiles of each monitored weight"""
    weights = monitored_draws(sample, model)
    return {
        "label": np.array(model.monitored_labels()),
        "mean": weights.mean(axis=0),
        "q025": np.quantile(weights, 0.025, axis=0),
        "q975": np.quantile(weights, 0.975, axis=0),
    }
