"""Random search over the prior and multi-start MAP optimization"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize
from tqdm import tqdm

from src.errors import InitializationError
from src.gp.posterior import PosteriorTarget
from src.priors.layout import ParamVector
from src.priors.prior_set import PriorSet

logger = logging.getLogger(__name__)

# Objective value handed to the optimizer where the posterior vanishes
_OUT_OF_SUPPORT = 1e20
# Box on unconstrained coordinates; exp(25) is far outside any sensible scale
UNCONSTRAINED_BOUND = 25.0


@dataclass
class Candidate:
    params: ParamVector
    log_posterior: float


@dataclass
class OptimizationResult:
    """Outcome of one optimizer start"""
    start: int
    initial_log_posterior: float
    log_posterior: float
    params: Optional[ParamVector]
    converged: bool
    iterations: int
    message: str

    def to_dict(self):
        return {
            "start": self.start,
            "initial_log_posterior": self.initial_log_posterior,
            "log_posterior": self.log_posterior,
            "converged": self.converged,
            "iterations": self.iterations,
            "message": self.message,
            "params": self.params.as_dict() if self.params is not None else None,
        }


def random_search(target: PosteriorTarget, priors: PriorSet, n_random: int,
                  rng: np.random.Generator, show_progress: bool = False) -> List[Candidate]:
    """
    Score n_random initialization draws by log posterior

    Args:
        target: posterior of one model on one training set
        priors: prior set holding the initialization distributions
        n_random: number of draws
        rng: random generator
        show_progress: show a progress bar

    Returns:
        Candidates sorted by log posterior, highest first
    """
    draws = priors.draw_init(n_random, target.layout, rng)
    scores = np.empty(len(draws))
    for i, params in enumerate(tqdm(draws, desc=f"Random search {target.model.name}",
                                    disable=not show_progress, leave=False)):
        scores[i] = target.log_density(params.unconstrained(), jacobian=False)
    order = np.argsort(-scores, kind="stable")
    if not np.isfinite(scores[order[0]]):
        raise InitializationError(f"All {n_random} random-search candidates have zero posterior density")
    logger.info(f"{target.model.name}: random search best log posterior {scores[order[0]]:.4f}")
    return [Candidate(draws[i], float(scores[i])) for i in order]


def _objective(target: PosteriorTarget):
    def negative(u: np.ndarray) -> Tuple[float, np.ndarray]:
        value, grad = target.log_density_and_grad(u, jacobian=False)
        if not np.isfinite(value):
            return _OUT_OF_SUPPORT, np.zeros_like(u)
        return -value, -grad
    return negative


def multistart_optimize(candidates: List[Candidate], n_opts: int, target: PosteriorTarget,
                        max_iter: int = 1000, show_progress: bool = False
                        ) -> Tuple[Candidate, List[OptimizationResult]]:
    """
    L-BFGS-B ascent of the log posterior from the top n_opts candidates

    The best of all terminal points and starting candidates is returned, so the
    result never falls below the best initial value.

    Args:
        candidates: ranked candidates from random_search
        n_opts: number of starts
        target: posterior of one model on one training set
        max_iter: iteration limit per start
        show_progress: show a progress bar

    Returns:
        Tuple of (MAP candidate, per-start results)
    """
    if not candidates:
        raise InitializationError("multistart_optimize needs at least one candidate")
    starts = [c for c in candidates if np.isfinite(c.log_posterior)][:max(n_opts, 1)]
    if not starts:
        raise InitializationError("No candidate with finite log posterior to start from")

    objective = _objective(target)
    bounds = [(-UNCONSTRAINED_BOUND, UNCONSTRAINED_BOUND)] * target.dim
    results: List[OptimizationResult] = []
    best = max(starts, key=lambda c: c.log_posterior)
    failures = 0

    for i, start in enumerate(tqdm(starts, desc=f"Optimizing {target.model.name}",
                                   disable=not show_progress, leave=False)):
        u0 = np.clip(start.params.unconstrained(), -UNCONSTRAINED_BOUND, UNCONSTRAINED_BOUND)
        try:
            fit = minimize(objective, u0, jac=True, method="L-BFGS-B", bounds=bounds,
                           options={"maxiter": max_iter})
            params = ParamVector.from_unconstrained(target.layout, fit.x)
            value = target.log_density(fit.x, jacobian=False)
        except (ArithmeticError, ValueError, np.linalg.LinAlgError) as e:
            failures += 1
            logger.warning(f"{target.model.name}: optimizer start {i + 1} failed: {e}")
            results.append(OptimizationResult(i + 1, start.log_posterior, -np.inf, None, False, 0, str(e)))
            continue

        results.append(OptimizationResult(
            i + 1, start.log_posterior, value, params, bool(fit.success), int(fit.nit), str(fit.message)
        ))
        logger.debug(f"{target.model.name}: start {i + 1}: {start.log_posterior:.4f} -> {value:.4f} ({fit.message})")
        if np.isfinite(value) and value > best.log_posterior:
            best = Candidate(params, value)

    if failures == len(starts):
        raise InitializationError(f"All {len(starts)} optimizer starts failed for {target.model.name}")
    logger.info(f"{target.model.name}: MAP log posterior {best.log_posterior:.4f}")
    return best, results
