"""Dense positive definite linear algebra"""

import logging
from typing import Tuple

import numpy as np
from scipy import linalg as la

from src.errors import NumericalError

logger = logging.getLogger(__name__)

JITTER_START = 1e-10
JITTER_MAX = 1e-4


def jitchol(a: np.ndarray, jitter_start: float = JITTER_START,
            jitter_max: float = JITTER_MAX) -> Tuple[np.ndarray, float]:
    """
    Lower Cholesky factor, adding diagonal jitter only when the plain factorization fails

    Jitter starts at jitter_start * mean(diag) and doubles up to jitter_max * mean(diag).

    Args:
        a: symmetric matrix
        jitter_start: first relative jitter level
        jitter_max: largest relative jitter level

    Returns:
        Tuple of (lower factor L, absolute jitter added to the diagonal)
    """
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(a)):
        raise NumericalError("Matrix to factorize contains non-finite entries")
    try:
        return la.cholesky(a, lower=True, check_finite=False), 0.0
    except la.LinAlgError:
        pass

    scale = float(np.mean(np.diag(a)))
    if not scale > 0:
        scale = 1.0
    relative = jitter_start
    jitter = relative * scale
    while relative <= jitter_max:
        jitter = relative * scale
        try:
            lower = la.cholesky(a + jitter * np.eye(a.shape[0]), lower=True, check_finite=False)
            logger.debug(f"Cholesky succeeded with jitter {jitter:.3g}")
            return lower, jitter
        except la.LinAlgError:
            relative *= 2.0
    raise NumericalError(f"Cholesky failed after adding jitter up to {jitter:.3g}", jitter=jitter)


def log_det(lower: np.ndarray) -> float:
    return float(2.0 * np.sum(np.log(np.diag(lower))))


def chol_solve(lower: np.ndarray, b: np.ndarray) -> np.ndarray:
    return la.cho_solve((lower, True), b, check_finite=False)


def chol_inverse(lower: np.ndarray) -> np.ndarray:
    return chol_solve(lower, np.eye(lower.shape[0]))


def lower_solve(lower: np.ndarray, b: np.ndarray) -> np.ndarray:
    return la.solve_triangular(lower, b, lower=True, check_finite=False)
