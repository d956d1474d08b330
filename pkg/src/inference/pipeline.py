"""Estimation pipeline: random search, MAP optimization, one chain, diagnostics"""

import logging
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional

import numpy as np

from src.dataset.loader import Dataset
from src.errors import ConfigError
from src.gp.posterior import PosteriorTarget
from src.inference.diagnostics import DiagnosticsReport, diagnose
from src.inference.metropolis import run_rwm
from src.inference.nuts import run_nuts
from src.inference.samples import PosteriorSample
from src.inference.search import Candidate, OptimizationResult, multistart_optimize, random_search
from src.models.base import BaseKernelModel
from src.priors.layout import ParamVector
from src.priors.prior_set import PriorSet

logger = logging.getLogger(__name__)

SAMPLERS = ("nuts", "rwm")


@dataclass
class McmcConfig:
    n_random: int = 3000
    n_opts: int = 30
    warmup: int = 500
    M: int = 1500
    target_accept: float = 0.8
    max_treedepth: int = 10
    seed: Optional[int] = None
    sampler: str = "nuts"
    max_iter: int = 1000
    geweke_threshold: float = 3.0
    mcse_ratio: float = 0.1

    def validate(self) -> List[str]:
        issues = []
        for name in ("n_random", "n_opts", "M", "max_treedepth", "max_iter"):
            if getattr(self, name) < 1:
                issues.append(f"mcmc.{name} must be positive, got {getattr(self, name)}")
        if self.warmup < 0:
            issues.append(f"mcmc.warmup must be nonnegative, got {self.warmup}")
        if self.M < 20:
            issues.append(f"mcmc.M must be at least 20 for the Geweke diagnostic, got {self.M}")
        if not 0 < self.target_accept < 1:
            issues.append(f"mcmc.target_accept must lie in (0, 1), got {self.target_accept}")
        if self.sampler not in SAMPLERS:
            issues.append(f"mcmc.sampler must be one of {SAMPLERS}, got '{self.sampler}'")
        if self.geweke_threshold <= 0 or self.mcse_ratio <= 0:
            issues.append("mcmc.geweke_threshold and mcmc.mcse_ratio must be positive")
        return issues

    def to_dict(self) -> Dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Optional[Dict]) -> "McmcConfig":
        data = dict(data or {})
        unknown = sorted(set(data) - set(cls.__dataclass_fields__))
        if unknown:
            raise ConfigError(f"Unknown mcmc settings: {', '.join(unknown)}")
        return cls(**data)


@dataclass
class FitResult:
    """Everything the pipeline produces for one (subset, model, input) combination"""
    model: BaseKernelModel
    map_estimate: Candidate
    optimizations: List[OptimizationResult]
    sample: PosteriorSample
    diagnostics: DiagnosticsReport
    n_candidates: int = 0


def sample(map_init: ParamVector, target: PosteriorTarget, cfg: McmcConfig,
           rng: np.random.Generator, show_progress: bool = False) -> PosteriorSample:
    """Run one chain from the MAP estimate and return M constrained draws"""
    if not map_init.in_support():
        raise ConfigError(f"Sampler start {map_init!r} is outside the prior support")
    u0 = map_init.unconstrained()
    label = target.model.name
    if cfg.sampler == "rwm":
        chain = run_rwm(target.log_density_and_grad, u0, cfg.warmup, cfg.M, rng,
                        show_progress=show_progress, label=label)
    else:
        chain = run_nuts(target.log_density_and_grad, u0, cfg.warmup, cfg.M, rng,
                         target_accept=cfg.target_accept, max_treedepth=cfg.max_treedepth,
                         show_progress=show_progress, label=label)
    result = PosteriorSample.from_chain(target.layout, chain)
    logger.info(f"{label}: {result.M} draws, mean accept {result.accept_stats.mean():.3f}, "
                f"{result.divergences} divergences, step size {result.step_size:.4g}")
    return result


def fit_model(model: BaseKernelModel, train: Dataset, priors: PriorSet, cfg: McmcConfig,
              rng: np.random.Generator, show_progress: bool = False) -> FitResult:
    """
    Full estimation for one model on one training set

    Args:
        model: unprepared or prepared kernel model
        train: training data
        priors: prior set
        cfg: pipeline settings
        rng: generator owned by this combination
        show_progress: show progress bars

    Returns:
        FitResult with MAP estimate, posterior sample and diagnostics
    """
    if not model.is_prepared:
        model.prepare(train)
    target = PosteriorTarget(model, train, priors)

    candidates = random_search(target, priors, cfg.n_random, rng, show_progress)
    best, optimizations = multistart_optimize(candidates, cfg.n_opts, target, cfg.max_iter, show_progress)
    posterior = sample(best.params, target, cfg, rng, show_progress)
    report = diagnose(posterior, model, cfg.geweke_threshold, cfg.mcse_ratio)
    return FitResult(model, best, optimizations, posterior, report, n_candidates=len(candidates))
