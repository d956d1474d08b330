"""Weighted squared distances between profiles and score vectors"""

from typing import Optional

import numpy as np

from src.dataset.loader import IndexGrid
from src.errors import ShapeError
from src.kernel.weights import AlfParams, alf_weight


def trapezoid_weights(grid: IndexGrid) -> np.ndarray:
    """Quadrature weights q with sum_k q_k f(t_k) equal to the trapezoid rule on the grid"""
    steps = np.diff(grid.t)
    q = np.zeros(grid.K)
    q[:-1] += 0.5 * steps
    q[1:] += 0.5 * steps
    return q


def _pair(xi, xj, length: Optional[int] = None):
    xi = np.asarray(xi, dtype=float)
    xj = np.asarray(xj, dtype=float)
    if xi.shape != xj.shape or xi.ndim != 1:
        raise ShapeError(f"Vectors must share a 1-D shape, got {xi.shape} and {xj.shape}")
    if length is not None and xi.size != length:
        raise ShapeError(f"Expected vectors of length {length}, got {xi.size}")
    return xi, xj


def d_omega(xi, xj, grid: IndexGrid, phi: float, p: AlfParams) -> float:
    """Trapezoid approximation of phi^-2 times the integral of omega(t) (X_i(t) - X_j(t))^2"""
    xi, xj = _pair(xi, xj, grid.K)
    integrand = alf_weight(grid.t, p) * (xi - xj) ** 2
    area = np.sum(np.diff(grid.t) * (integrand[1:] + integrand[:-1]) / 2.0)
    return float(area / phi ** 2)


def d_ard(xi, xj, sigma_x) -> float:
    xi, xj = _pair(xi, xj)
    sigma_x = np.broadcast_to(np.asarray(sigma_x, dtype=float), xi.shape)
    return float(np.sum((xi - xj) ** 2 / sigma_x ** 2))


def d_pc(si, sj, sigma) -> float:
    """Distance between FPCA score vectors; same form as d_ard on score space"""
    return d_ard(si, sj, sigma)


class DistanceCache:
    """
    Precomputed features for distances D_ij = sum_k c_k (a_ik - b_jk)^2

    Every kernel in this package is such a weighted squared distance, so only the
    coefficient vector c changes between parameter proposals.
    """

    def __init__(self, features: np.ndarray, other: Optional[np.ndarray] = None):
        self.a = np.asarray(features, dtype=float)
        self.square = other is None
        self.b = self.a if other is None else np.asarray(other, dtype=float)
        if self.a.ndim != 2 or self.b.ndim != 2 or self.a.shape[1] != self.b.shape[1]:
            raise ShapeError(f"Feature matrices do not align: {self.a.shape} vs {self.b.shape}")
        self.a_sq = self.a ** 2
        self.b_sq = self.a_sq if other is None else self.b ** 2
        for array in (self.a, self.b, self.a_sq, self.b_sq):
            array.setflags(write=False)

    @property
    def n_features(self) -> int:
        return int(self.a.shape[1])

    def distance(self, c: np.ndarray) -> np.ndarray:
        """Distance matrix for coefficients c; symmetric with zero diagonal when square"""
        c = np.asarray(c, dtype=float)
        if c.shape != (self.n_features,):
            raise ShapeError(f"Expected {self.n_features} distance coefficients, got shape {c.shape}")
        cross = (self.a * c) @ self.b.T
        d = (self.a_sq @ c)[:, None] + (self.b_sq @ c)[None, :] - 2.0 * cross
        np.maximum(d, 0.0, out=d)
        if self.square:
            d = 0.5 * (d + d.T)
            np.fill_diagonal(d, 0.0)
        return d

    def coefficient_gradient(self, weights: np.ndarray) -> np.ndarray:
        """
        g_k = sum_ij W_ij (a_ik - a_jk)^2 for a symmetric weight matrix W

        Only valid for the square cache over one feature set.
        """
        if not self.square:
            raise ShapeError("Coefficient gradients need a square distance cache")
        row_sums = weights.sum(axis=1)
        return 2.0 * (self.a_sq.T @ row_sums) - 2.0 * np.einsum("ik,ik->k", self.a, weights @ self.a)


def weighted_distance_matrix(a: np.ndarray, c: np.ndarray, b: Optional[np.ndarray] = None) -> np.ndarray:
    return DistanceCache(a, b).distance(c)
