"""Exact Gaussian process likelihood, posterior and prediction"""

from .core import FittedGP, PredictiveDist, grad_log_posterior, log_marginal, log_posterior, predict
from .linalg import chol_inverse, chol_solve, jitchol, log_det, lower_solve
from .posterior import PosteriorTarget

__all__ = [
    'FittedGP', 'PredictiveDist', 'predict', 'log_marginal', 'log_posterior', 'grad_log_posterior',
    'PosteriorTarget', 'jitchol', 'log_det', 'chol_solve', 'chol_inverse', 'lower_solve',
]
