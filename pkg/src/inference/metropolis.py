"""Random-walk Metropolis fallback sampler"""

import logging
from typing import Callable, Tuple

import numpy as np
from tqdm import tqdm

from src.errors import InitializationError
from src.inference.samples import ChainOutput

logger = logging.getLogger(__name__)

TARGET_ACCEPT = 0.234


def run_rwm(log_density_and_grad: Callable[[np.ndarray], Tuple[float, np.ndarray]],
            u0: np.ndarray, warmup: int, n_samples: int, rng: np.random.Generator,
            show_progress: bool = False, label: str = "") -> ChainOutput:
    """
    Gaussian random-walk Metropolis in unconstrained space

    During warmup the proposal scale follows a Robbins-Monro recursion toward an
    acceptance rate of 0.234 and the second half of warmup sets a diagonal
    proposal covariance.
    """
    u = np.asarray(u0, dtype=float).copy()
    log_p, _ = log_density_and_grad(u)
    if not np.isfinite(log_p):
        raise InitializationError("Sampler starting point has zero posterior density")

    dim = u.size
    log_scale = np.log(2.38 / np.sqrt(dim))
    proposal_var = np.ones(dim)
    window = []

    draws = np.empty((n_samples, dim))
    log_density = np.empty(n_samples)
    accept_stats = np.empty(n_samples)

    for i in tqdm(range(warmup + n_samples), desc=f"Sampling {label}".strip(),
                  disable=not show_progress, leave=False):
        proposal = u + np.exp(log_scale) * np.sqrt(proposal_var) * rng.standard_normal(dim)
        proposal_log_p, _ = log_density_and_grad(proposal)
        log_ratio = proposal_log_p - log_p if np.isfinite(proposal_log_p) else -np.inf
        alpha = float(np.exp(min(0.0, log_ratio)))
        if rng.uniform() < alpha:
            u, log_p = proposal, proposal_log_p

        if i < warmup:
            log_scale += (alpha - TARGET_ACCEPT) / np.sqrt(i + 1.0)
            if i >= warmup // 2:
                window.append(u)
            if i == warmup - 1 and len(window) >= 10:
                proposal_var = np.var(np.array(window), axis=0, ddof=1) + 1e-8
                log_scale = np.log(2.38 / np.sqrt(dim))
            continue
        j = i - warmup
        draws[j] = u
        log_density[j] = log_p
        accept_stats[j] = alpha

    logger.info(f"{label}: random-walk Metropolis mean acceptance {accept_stats.mean():.3f}")
    zeros = np.zeros(n_samples, dtype=int)
    return ChainOutput(draws, log_density, accept_stats, zeros, zeros.copy(),
                       np.zeros(n_samples, dtype=bool), float(np.exp(log_scale)),
                       proposal_var, 0, "rwm")
