"""Out-of-sample validation statistics"""

import asyncio
import logging
from dataclasses import asdict, dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.special import logsumexp
from tqdm.asyncio import tqdm

from src.dataset.loader import Dataset
from src.errors import ConfigError
from src.gp.core import FittedGP, PredictiveDist
from src.gp.linalg import chol_solve, jitchol, log_det
from src.inference.samples import PosteriorSample
from src.models.base import KernelSpec
from src.priors.layout import ParamVector

logger = logging.getLogger(__name__)

_LOG_2PI = np.log(2.0 * np.pi)
# Half-width of the nominal 95% interval in predictive standard deviations
COVERAGE_Z = 1.96

STATISTICS = ("rmse", "neg_ppld", "neg_crps", "coverage95", "r2")

FitBuilder = Callable[[ParamVector], FittedGP]


@dataclass
class ValidationStats:
    """
    Validation statistics of one prediction

    neg_crps is -(-log|S| - D^2) = log|S| + D^2, a quadratic-form score that shares
    its name with, but is not, the continuous ranked probability score.
    """
    rmse: float
    neg_ppld: float
    neg_crps: float
    coverage95: float
    r2: float
    neg_ppld_mean_log: float = float("nan")

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def predictive_statistics(pred: PredictiveDist, y_star: np.ndarray) -> ValidationStats:
    """
    Statistics of observed outputs under a predictive distribution

    Args:
        pred: predictive mean and covariance
        y_star: observed test outputs

    Returns:
        ValidationStats, losses negated so that lower is better
    """
    y_star = np.asarray(y_star, dtype=float)
    e = y_star - pred.mean
    n = y_star.size
    lower, _ = jitchol(pred.cov)
    d2 = float(e @ chol_solve(lower, e))
    logdet = log_det(lower)
    ppld = -0.5 * logdet - 0.5 * d2 - 0.5 * n * _LOG_2PI
    crps = -logdet - d2

    sse = float(e @ e)
    sst = float(np.sum((y_star - y_star.mean()) ** 2))
    half_width = COVERAGE_Z * pred.sd
    covered = np.abs(e) <= half_width
    return ValidationStats(
        rmse=float(np.sqrt(sse / n)),
        neg_ppld=float(-ppld),
        neg_crps=float(-crps),
        coverage95=float(covered.mean()),
        r2=float(1.0 - sse / sst) if sst > 0 else float("nan"),
        neg_ppld_mean_log=float(-ppld),
    )


def stats_at_theta(fit: FittedGP, test: Dataset, theta: Optional[ParamVector] = None) -> ValidationStats:
    """Statistics at one parameter vector; refits on the same training data when theta is given"""
    if theta is not None:
        fit = FittedGP.fit(KernelSpec(fit.spec.model, theta), fit.train)
    return predictive_statistics(fit.predict(test), test.outputs)


def combine_draw_stats(per_draw: List[ValidationStats]) -> ValidationStats:
    """
    Posterior average over draws

    Every statistic is the arithmetic mean over draws except neg_ppld, which is
    minus the log of the mean predictive density; neg_ppld_mean_log keeps the
    mean of the per-draw values.
    """
    if not per_draw:
        raise ConfigError("No draws to average")
    neg_ppld = np.array([s.neg_ppld for s in per_draw])
    return ValidationStats(
        rmse=float(np.mean([s.rmse for s in per_draw])),
        neg_ppld=float(-(logsumexp(-neg_ppld) - np.log(neg_ppld.size))),
        neg_crps=float(np.mean([s.neg_crps for s in per_draw])),
        coverage95=float(np.mean([s.coverage95 for s in per_draw])),
        r2=float(np.mean([s.r2 for s in per_draw])),
        neg_ppld_mean_log=float(np.mean(neg_ppld)),
    )


def posterior_stats(fit_builder: FitBuilder, posterior: PosteriorSample, test: Dataset,
                    n_thin: int = 100, method: str = "systematic", batch_size: int = 150,
                    rng: Optional[np.random.Generator] = None) -> ValidationStats:
    """
    Posterior-averaged statistics over a thinned sample

    Args:
        fit_builder: maps a parameter vector to a FittedGP on the training data
        posterior: post-warmup sample
        test: test data
        n_thin: number of thinned draws
        method: "systematic" or "batch" thinning
        batch_size: batch length for batch thinning
        rng: generator for batch thinning

    Returns:
        ValidationStats averaged over the thinned draws
    """
    if posterior.M == 0:
        raise ConfigError("Cannot validate an empty posterior sample")
    thinned = posterior.thin(n_thin, method, batch_size, rng)
    per_draw = [
        predictive_statistics(fit_builder(thinned.param_vector(i)).predict(test), test.outputs)
        for i in range(thinned.M)
    ]
    return combine_draw_stats(per_draw)


def mixture_moments(predictions: List[PredictiveDist]) -> Tuple[np.ndarray, np.ndarray]:
    """Pointwise mean and standard deviation of an equal-weight mixture of predictions"""
    if not predictions:
        raise ConfigError("No predictions to mix")
    means = np.array([p.mean for p in predictions])
    variances = np.array([p.variance for p in predictions])
    mean = means.mean(axis=0)
    variance = variances.mean(axis=0) + means.var(axis=0)
    return mean, np.sqrt(np.clip(variance, 0.0, None))


def posterior_predictive(fit_builder: FitBuilder, posterior: PosteriorSample, test: Dataset,
                         n_thin: int = 100, method: str = "systematic", batch_size: int = 150,
                         rng: Optional[np.random.Generator] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Predictive mean and sd on the test inputs, mixing the thinned posterior draws"""
    thinned = posterior.thin(n_thin, method, batch_size, rng)
    return mixture_moments([fit_builder(thinned.param_vector(i)).predict(test) for i in range(thinned.M)])


class Evaluator:
    """Validates thinned posterior draws concurrently"""

    def __init__(self, fit_builder: FitBuilder, test: Dataset, parallelism: int = 1):
        self.fit_builder = fit_builder
        self.test = test
        self.parallelism = max(parallelism, 1)

    def _evaluate(self, params: ParamVector) -> ValidationStats:
        return predictive_statistics(self.fit_builder(params).predict(self.test), self.test.outputs)

    async def evaluate_single(self, params: ParamVector) -> ValidationStats:
        return await asyncio.to_thread(self._evaluate, params)

    async def evaluate_batch(self, draws: List[ParamVector], show_progress: bool = True,
                             label: str = "") -> List[ValidationStats]:
        """Evaluate draws in chunks of `parallelism`, keeping draw order"""
        results: List[ValidationStats] = []
        progress_bar = tqdm(total=len(draws), desc=f"Validating {label}".strip(), leave=False) \
            if show_progress else None

        for i in range(0, len(draws), self.parallelism):
            batch = draws[i:i + self.parallelism]
            results.extend(await asyncio.gather(*[self.evaluate_single(p) for p in batch]))
            if progress_bar:
                progress_bar.update(len(batch))

        if progress_bar:
            progress_bar.close()
        return results

    async def evaluate(self, posterior: PosteriorSample, n_thin: int = 100, method: str = "systematic",
                       batch_size: int = 150, rng: Optional[np.random.Generator] = None,
                       show_progress: bool = True, label: str = "") -> ValidationStats:
        if posterior.M == 0:
            raise ConfigError("Cannot validate an empty posterior sample")
        thinned = posterior.thin(n_thin, method, batch_size, rng)
        draws = [thinned.param_vector(i) for i in range(thinned.M)]
        per_draw = await self.evaluate_batch(draws, show_progress, label)
        return combine_draw_stats(per_draw)
