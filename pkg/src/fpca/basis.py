"""Cubic B-spline basis for profile smoothing"""

import logging
from dataclasses import dataclass
from typing import Dict

import numpy as np
from scipy.interpolate import BSpline

from src.dataset.loader import IndexGrid
from src.errors import DataError, NumericalError

logger = logging.getLogger(__name__)

_CONDITION_WARNING = 1e12


@dataclass(frozen=True, eq=False)
class BasisSystem:
    """Clamped B-spline basis on [0, 1] evaluated on an index grid"""
    grid: IndexGrid
    knots: np.ndarray
    degree: int
    matrix: np.ndarray
    projection: np.ndarray

    @property
    def n_basis(self) -> int:
        return int(self.matrix.shape[1])

    def coefficients(self, inputs: np.ndarray) -> np.ndarray:
        """Least-squares basis coefficients of each profile (rows)"""
        return np.asarray(inputs, dtype=float) @ self.projection.T

    def smooth(self, inputs: np.ndarray) -> np.ndarray:
        return self.coefficients(inputs) @ self.matrix.T

    def to_dict(self) -> Dict:
        return {"grid": self.grid.to_list(), "knots": self.knots.tolist(), "degree": self.degree}

    @classmethod
    def from_dict(cls, data: Dict) -> "BasisSystem":
        return _build(IndexGrid(data["grid"]), np.asarray(data["knots"], dtype=float), int(data["degree"]))


def _build(grid: IndexGrid, knots: np.ndarray, degree: int) -> BasisSystem:
    matrix = BSpline.design_matrix(grid.t, knots, degree).toarray()
    n_basis = matrix.shape[1]
    if np.linalg.matrix_rank(matrix) < n_basis:
        raise NumericalError(f"Spline basis is rank deficient on a grid of {grid.K} points")
    condition = np.linalg.cond(matrix.T @ matrix)
    if condition > _CONDITION_WARNING:
        logger.warning(f"Spline Gram matrix is poorly conditioned (cond={condition:.3g})")
    return BasisSystem(grid, knots, degree, matrix, np.linalg.pinv(matrix))


def fit_basis(grid: IndexGrid, n_basis: int = 12, degree: int = 3) -> BasisSystem:
    """
    Equally spaced clamped B-spline basis with exactly n_basis functions

    The default 12 cubic functions use 8 interior breakpoints at j/9.

    Args:
        grid: index grid the basis is evaluated on
        n_basis: number of basis functions
        degree: spline degree

    Returns:
        BasisSystem with a K x n_basis evaluation matrix
    """
    if n_basis < degree + 1:
        raise DataError(f"Need at least {degree + 1} basis functions for degree {degree}, got {n_basis}")
    if grid.K < n_basis:
        raise DataError(f"Grid has {grid.K} points, fewer than the {n_basis} basis functions")
    breaks = np.linspace(0.0, 1.0, n_basis - degree + 1)
    knots = np.concatenate([np.zeros(degree), breaks, np.ones(degree)])
    return _build(grid, knots, degree)
