"""Vector-input models on the discretized profiles"""

from typing import List

import numpy as np

from src.dataset.loader import Dataset
from src.models.base import BaseKernelModel
from src.priors.layout import ParameterSpec, Transform


class VectorInputModel(BaseKernelModel):
    """Profiles used as K-dimensional vectors"""

    family = "viGP"
    supports_screening = True

    def features(self, data: Dataset) -> np.ndarray:
        self.check_grid(data)
        return np.asarray(data.inputs)


class SquaredExponentialModel(VectorInputModel):
    """One length scale shared by all grid points"""

    name = "SE"

    def kernel_parameters(self) -> List[ParameterSpec]:
        return [ParameterSpec("sigma_x", Transform.LOG, "length_scale")]

    def coefficients(self, kernel_theta: np.ndarray) -> np.ndarray:
        return np.full(self.grid.K, kernel_theta[0] ** -2)

    def coefficient_vjp(self, kernel_theta: np.ndarray, grad_c: np.ndarray) -> np.ndarray:
        return np.array([-2.0 * kernel_theta[0] ** -3 * np.sum(grad_c)])

    def monitored_weights(self, kernel_theta: np.ndarray) -> np.ndarray:
        return np.array([kernel_theta[0] ** -2])

    def monitored_labels(self) -> List[str]:
        return ["inv_sigma_x_sq"]


class ARDModel(VectorInputModel):
    """One length scale per grid point"""

    name = "ARD"

    def kernel_parameters(self) -> List[ParameterSpec]:
        return [ParameterSpec(f"sigma_x_{k + 1}", Transform.LOG, "length_scale") for k in range(self.grid.K)]

    def coefficients(self, kernel_theta: np.ndarray) -> np.ndarray:
        return np.asarray(kernel_theta) ** -2

    def coefficient_vjp(self, kernel_theta: np.ndarray, grad_c: np.ndarray) -> np.ndarray:
        return -2.0 * np.asarray(kernel_theta) ** -3 * grad_c

    def monitored_weights(self, kernel_theta: np.ndarray) -> np.ndarray:
        return np.asarray(kernel_theta) ** -2

    def monitored_labels(self) -> List[str]:
        return [f"inv_sigma_x_sq_{k + 1}" for k in range(self.grid.K)]
