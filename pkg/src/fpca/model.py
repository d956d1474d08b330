"""Functional principal components in spline coefficient space"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from src.dataset.loader import IndexGrid
from src.errors import DataError, ShapeError
from src.fpca.basis import BasisSystem

logger = logging.getLogger(__name__)

# Cumulative variance comparisons tolerate rounding
_VARIANCE_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class FpcaModel:
    basis: BasisSystem
    mean: np.ndarray
    loadings: np.ndarray
    eigenvalues: np.ndarray
    degenerate: bool = False

    @property
    def n_full(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def cumulative_variance(self) -> np.ndarray:
        total = self.eigenvalues.sum()
        if total <= 0:
            return np.ones(self.n_full)
        return np.cumsum(self.eigenvalues) / total

    def n_components(self, threshold: float = 0.99) -> int:
        """Smallest count whose cumulative explained variance reaches the threshold"""
        return int(np.argmax(self.cumulative_variance >= threshold - _VARIANCE_TOLERANCE) + 1)

    def check_grid(self, grid: IndexGrid) -> None:
        if not self.basis.grid.same_as(grid):
            raise ShapeError("Profiles are not on the grid the FPCA was fitted on")

    def transform(self, inputs: np.ndarray, n_components: Optional[int] = None) -> np.ndarray:
        inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
        if inputs.shape[1] != self.basis.grid.K:
            raise ShapeError(f"Profiles have {inputs.shape[1]} points but the FPCA grid has {self.basis.grid.K}")
        centered = self.basis.coefficients(inputs) - self.mean
        scores = centered @ self.loadings
        return scores if n_components is None else scores[:, :n_components]

    def to_dict(self) -> Dict:
        return {
            "basis": self.basis.to_dict(),
            "mean": self.mean.tolist(),
            "loadings": self.loadings.tolist(),
            "eigenvalues": self.eigenvalues.tolist(),
            "degenerate": self.degenerate,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "FpcaModel":
        return cls(
            basis=BasisSystem.from_dict(data["basis"]),
            mean=np.asarray(data["mean"], dtype=float),
            loadings=np.asarray(data["loadings"], dtype=float),
            eigenvalues=np.asarray(data["eigenvalues"], dtype=float),
            degenerate=bool(data.get("degenerate", False)),
        )


def fit_fpca(inputs: np.ndarray, basis: BasisSystem) -> FpcaModel:
    """
    Fit FPCA on training profiles

    Eigenvectors are signed so their largest-magnitude entry is positive.

    Args:
        inputs: N x K training profiles on the basis grid
        basis: spline basis

    Returns:
        FpcaModel with eigenvalues sorted in descending order
    """
    inputs = np.asarray(inputs, dtype=float)
    if inputs.ndim != 2 or inputs.shape[0] < 2:
        raise DataError(f"FPCA needs at least 2 profiles, got shape {inputs.shape}")
    if inputs.shape[1] != basis.grid.K:
        raise ShapeError(f"Profiles have {inputs.shape[1]} points but the basis grid has {basis.grid.K}")

    coefficients = basis.coefficients(inputs)
    mean = coefficients.mean(axis=0)
    centered = coefficients - mean
    cov = centered.T @ centered / (inputs.shape[0] - 1)
    eigenvalues, vectors = np.linalg.eigh(0.5 * (cov + cov.T))
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues = np.clip(eigenvalues[order], 0.0, None)
    vectors = vectors[:, order]
    signs = np.sign(vectors[np.argmax(np.abs(vectors), axis=0), np.arange(vectors.shape[1])])
    vectors = vectors * np.where(signs == 0, 1.0, signs)

    degenerate = bool(eigenvalues.sum() <= 0)
    if degenerate:
        eigenvalues = np.zeros_like(eigenvalues)
        logger.warning("All training profiles share the same coefficients; FPCA is degenerate")
    return FpcaModel(basis, mean, vectors, eigenvalues, degenerate)


def transform(model: FpcaModel, inputs: np.ndarray, n_components: Optional[int] = None) -> np.ndarray:
    return model.transform(inputs, n_components)
