"""
Brute-force reference computations for tests

Nothing here shares linear algebra with the package: densities use an explicit
LU determinant and inverse, norms use a fine midpoint rule on interpolated
profiles. Sizes are capped so these never end up in production paths.
"""

from typing import Callable

import numpy as np

MAX_DENSE_N = 8


def mvn_logpdf_dense(y, mean, cov) -> float:
    """Multivariate normal log density by explicit inverse and determinant"""
    y = np.asarray(y, dtype=float).reshape(-1)
    mean = np.asarray(mean, dtype=float).reshape(-1)
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    n = y.size
    assert n <= MAX_DENSE_N, f"oracle is limited to N <= {MAX_DENSE_N}"
    assert cov.shape == (n, n) and mean.shape == (n,)
    sign, logdet = np.linalg.slogdet(cov)
    if sign <= 0 or not np.isfinite(logdet):
        raise np.linalg.LinAlgError("covariance is singular or not positive definite")
    r = y - mean
    quad = float(r @ np.linalg.inv(cov) @ r)
    return float(-0.5 * quad - 0.5 * logdet - 0.5 * n * np.log(2.0 * np.pi))


def riemann_norm(t, xi, xj, weight: Callable[[np.ndarray], np.ndarray], n_grid: int = 100_000) -> float:
    """Midpoint sum of w(s) (X_i(s) - X_j(s))^2 over [t_0, t_K] with linear interpolation"""
    t = np.asarray(t, dtype=float)
    edges = np.linspace(t[0], t[-1], n_grid + 1)
    s = 0.5 * (edges[1:] + edges[:-1])
    diff = np.interp(s, t, np.asarray(xi, dtype=float)) - np.interp(s, t, np.asarray(xj, dtype=float))
    return float(np.sum(weight(s) * diff ** 2) * (edges[1] - edges[0]))


def fd_gradient(f: Callable[[np.ndarray], float], theta, h: float = 1e-5) -> np.ndarray:
    """Central differences per coordinate"""
    theta = np.asarray(theta, dtype=float)
    grad = np.empty_like(theta)
    for i in range(theta.size):
        step = np.zeros_like(theta)
        step[i] = h
        up, down = f(theta + step), f(theta - step)
        if not (np.isfinite(up) and np.isfinite(down)):
            raise FloatingPointError(f"non-finite evaluation at coordinate {i}")
        grad[i] = (up - down) / (2.0 * h)
    return grad
