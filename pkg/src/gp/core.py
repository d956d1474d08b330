"""Exact GP fit, prediction and the parameter posterior"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.dataset.loader import Dataset
from src.gp.linalg import chol_solve, jitchol, lower_solve
from src.gp.posterior import PosteriorTarget
from src.kernel.covariance import covariance
from src.kernel.distances import DistanceCache
from src.models.base import KernelSpec
from src.priors.prior_set import PriorSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PredictiveDist:
    mean: np.ndarray
    cov: np.ndarray

    @property
    def variance(self) -> np.ndarray:
        return np.diag(self.cov).copy()

    @property
    def sd(self) -> np.ndarray:
        return np.sqrt(np.clip(self.variance, 0.0, None))


@dataclass(frozen=True, eq=False)
class FittedGP:
    """Factorized training covariance S_y = L L^T and alpha = S_y^-1 (y - m_y)"""
    spec: KernelSpec
    train: Dataset
    features: np.ndarray
    chol: np.ndarray
    alpha: np.ndarray
    m_y: np.ndarray
    jitter: float = 0.0

    @classmethod
    def fit(cls, spec: KernelSpec, train: Dataset) -> "FittedGP":
        model = spec.model
        model.check_grid(train)
        features = model.features(train)
        d = DistanceCache(features).distance(spec.coefficients())
        s_y = covariance(d, spec.sigma_f, spec.sigma_eps, add_noise=True)
        lower, jitter = jitchol(s_y)
        if jitter > 0:
            logger.warning(f"{model.name}: training covariance needed jitter {jitter:.3g}")
        m_y = np.zeros(train.n)
        alpha = chol_solve(lower, train.outputs - m_y)
        return cls(spec, train, features, lower, alpha, m_y, jitter)

    def predict(self, x_star: Dataset, include_noise: bool = True) -> PredictiveDist:
        return predict(self, x_star, include_noise)


def predict(fit: FittedGP, x_star: Dataset, include_noise: bool = True) -> PredictiveDist:
    """
    Posterior predictive distribution at new inputs

    Args:
        fit: fitted GP
        x_star: test inputs on the training grid
        include_noise: add sigma_eps^2 to the predictive covariance diagonal

    Returns:
        PredictiveDist with a symmetrized covariance
    """
    spec = fit.spec
    spec.model.check_grid(x_star)
    c = spec.coefficients()
    test_features = spec.model.features(x_star)
    k_star = covariance(DistanceCache(test_features, fit.features).distance(c), spec.sigma_f, 0.0)
    mean = k_star @ fit.alpha
    v = lower_solve(fit.chol, k_star.T)
    k_ss = covariance(DistanceCache(test_features).distance(c), spec.sigma_f, spec.sigma_eps,
                      add_noise=include_noise)
    cov = k_ss - v.T @ v
    return PredictiveDist(mean, 0.5 * (cov + cov.T))


def log_marginal(spec: KernelSpec, data: Dataset) -> float:
    return PosteriorTarget(spec.model, data).log_marginal(spec.params)


def log_posterior(spec: KernelSpec, data: Dataset, priors: PriorSet) -> float:
    return PosteriorTarget(spec.model, data, priors).log_posterior(spec.params)


def grad_log_posterior(spec: KernelSpec, data: Dataset, priors: Optional[PriorSet],
                       include_jacobian: bool = True) -> np.ndarray:
    """
    Gradient of the log posterior in unconstrained coordinates

    With include_jacobian the log Jacobian of the transforms is part of the
    density, as sampled; without it this is the gradient of log_posterior
    composed with the constraining transforms.
    """
    target = PosteriorTarget(spec.model, data, priors)
    return target.log_density_and_grad(spec.params.unconstrained(), jacobian=include_jacobian)[1]
