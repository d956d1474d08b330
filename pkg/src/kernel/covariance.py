"""Squared exponential covariance with homogeneous noise"""

import numpy as np

from src.errors import ShapeError


def covariance(d: np.ndarray, sigma_f: float, sigma_eps: float, add_noise: bool = False) -> np.ndarray:
    """
    Covariance sigma_f^2 exp(-d / 2), plus sigma_eps^2 on the diagonal when add_noise

    Args:
        d: nonnegative distance matrix
        sigma_f: output signal scale
        sigma_eps: output noise scale
        add_noise: add the noise variance; only for a square self-covariance

    Returns:
        Covariance matrix shaped like d
    """
    d = np.asarray(d, dtype=float)
    s = sigma_f ** 2 * np.exp(-0.5 * d)
    if add_noise:
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise ShapeError(f"Noise is only added to a square self-covariance, got shape {s.shape}")
        s[np.diag_indices_from(s)] += sigma_eps ** 2
    return s
