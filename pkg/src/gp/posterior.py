"""Log posterior of a model's parameters on one training set"""

import logging
from typing import Optional, Tuple

import numpy as np

from src.dataset.loader import Dataset
from src.errors import NumericalError
from src.gp.linalg import chol_inverse, chol_solve, jitchol, log_det
from src.kernel.covariance import covariance
from src.kernel.distances import DistanceCache
from src.models.base import BaseKernelModel
from src.priors.layout import ParamVector
from src.priors.prior_set import PriorSet

logger = logging.getLogger(__name__)

_LOG_2PI = np.log(2.0 * np.pi)


class PosteriorTarget:
    """
    Marginal likelihood, log posterior and gradients for one (model, training set)

    Constrained values are ParamVector values; unconstrained coordinates u map
    through the layout transforms. Squared feature differences are cached once.
    """

    def __init__(self, model: BaseKernelModel, data: Dataset, priors: Optional[PriorSet] = None):
        model.check_grid(data)
        self.model = model
        self.data = data
        self.priors = priors
        self.layout = model.layout
        if priors is not None:
            priors.check_layout(self.layout)
        self.y = np.asarray(data.outputs, dtype=float)
        self.cache = DistanceCache(model.features(data))

    @property
    def dim(self) -> int:
        return self.layout.size

    def _params(self, values) -> ParamVector:
        return values if isinstance(values, ParamVector) else ParamVector(self.layout, values)

    def _factorize(self, theta: ParamVector):
        n_kernel = self.model.n_kernel
        kernel_theta = theta.values[:n_kernel]
        sigma_f, sigma_eps = theta.values[n_kernel], theta.values[n_kernel + 1]
        d = self.cache.distance(self.model.coefficients(kernel_theta))
        k_f = covariance(d, sigma_f, 0.0)
        s_y = k_f.copy()
        s_y[np.diag_indices_from(s_y)] += sigma_eps ** 2
        lower, jitter = jitchol(s_y)
        return kernel_theta, sigma_f, sigma_eps, k_f, lower

    def log_marginal(self, values) -> float:
        """Gaussian log likelihood of the outputs under the zero-mean GP"""
        theta = self._params(values)
        _, _, _, _, lower = self._factorize(theta)
        alpha = chol_solve(lower, self.y)
        return float(-0.5 * self.y @ alpha - 0.5 * log_det(lower) - 0.5 * self.y.size * _LOG_2PI)

    def log_prior(self, values) -> float:
        if self.priors is None:
            return 0.0 if self._params(values).in_support() else -np.inf
        return self.priors.log_density(self._params(values))

    def log_posterior(self, values) -> float:
        """Log marginal plus log prior in constrained space; -inf off the support"""
        theta = self._params(values)
        prior = self.log_prior(theta)
        if not np.isfinite(prior):
            return -np.inf
        return self.log_marginal(theta) + prior

    def _marginal_and_grad(self, theta: ParamVector) -> Tuple[float, np.ndarray]:
        kernel_theta, sigma_f, sigma_eps, k_f, lower = self._factorize(theta)
        alpha = chol_solve(lower, self.y)
        value = float(-0.5 * self.y @ alpha - 0.5 * log_det(lower) - 0.5 * self.y.size * _LOG_2PI)

        # d logp / d theta_j = 1/2 tr(W dS/dtheta_j) with W = alpha alpha^T - S^-1
        w = np.outer(alpha, alpha) - chol_inverse(lower)
        a = w * k_f
        # dS/dc_k = -1/2 K_f (x_ik - x_jk)^2
        grad_c = -0.25 * self.cache.coefficient_gradient(a)
        grad = np.empty(self.dim)
        grad[:self.model.n_kernel] = self.model.coefficient_vjp(kernel_theta, grad_c)
        grad[-2] = np.sum(a) / sigma_f
        grad[-1] = sigma_eps * np.trace(w)
        return value, grad

    def log_posterior_and_grad(self, values) -> Tuple[float, np.ndarray]:
        """Constrained log posterior and its gradient in constrained coordinates"""
        theta = self._params(values)
        prior = self.log_prior(theta)
        if not np.isfinite(prior):
            return -np.inf, np.full(self.dim, np.nan)
        value, grad = self._marginal_and_grad(theta)
        if self.priors is not None:
            grad = grad + self.priors.grad_log_density(theta)
        return value + prior, grad

    def log_density(self, u: np.ndarray, jacobian: bool = True) -> float:
        """Log posterior at the constrained image of u, plus the log Jacobian when requested"""
        try:
            theta = ParamVector.from_unconstrained(self.layout, u)
            value = self.log_posterior(theta)
        except NumericalError as e:
            logger.debug(f"Treating factorization failure as -inf: {e}")
            return -np.inf
        if jacobian and np.isfinite(value):
            value += self.layout.log_jacobian(u)
        return float(value) if np.isfinite(value) else -np.inf

    def log_density_and_grad(self, u: np.ndarray, jacobian: bool = True) -> Tuple[float, np.ndarray]:
        """
        Unconstrained log density and gradient

        Args:
            u: unconstrained coordinates
            jacobian: include the log Jacobian of the constraining transforms,
                as the sampler needs; leave it out to get the constrained log
                posterior expressed in u, as the optimizer uses

        Returns:
            Tuple of (value, gradient); (-inf, zeros) where the density vanishes
        """
        u = np.asarray(u, dtype=float)
        try:
            theta = ParamVector.from_unconstrained(self.layout, u)
            value, grad_theta = self.log_posterior_and_grad(theta)
        except NumericalError as e:
            logger.debug(f"Treating factorization failure as -inf: {e}")
            return -np.inf, np.zeros(self.dim)
        if not np.isfinite(value) or not np.all(np.isfinite(grad_theta)):
            return -np.inf, np.zeros(self.dim)
        grad = grad_theta * self.layout.dtheta_du(u)
        if jacobian:
            value += self.layout.log_jacobian(u)
            grad = grad + self.layout.grad_log_jacobian(u)
        return float(value), grad
