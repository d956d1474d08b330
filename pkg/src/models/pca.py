"""Vector-input models on FPCA scores"""

import logging
from typing import List, Optional

import numpy as np

from src.dataset.loader import Dataset
from src.fpca.basis import fit_basis
from src.fpca.model import FpcaModel, fit_fpca
from src.models.base import BaseKernelModel
from src.priors.layout import ParameterSpec, Transform

logger = logging.getLogger(__name__)


class FpcaScoreModel(BaseKernelModel):
    """ARD kernel over the leading FPCA scores of the training profiles"""

    family = "viGP"

    def __init__(self, config, fpca: Optional[FpcaModel] = None):
        super().__init__(config)
        self.fpca = fpca
        self.n_scores = 0

    def _prepare_features(self, train: Dataset) -> None:
        if self.fpca is None:
            basis = fit_basis(train.grid, n_basis=self.config.n_basis)
            self.fpca = fit_fpca(train.inputs, basis)
        self.fpca.check_grid(train.grid)
        self.n_scores = self._select_components(self.fpca)
        logger.info(f"{self.name}: using {self.n_scores} of {self.fpca.n_full} components")

    def _select_components(self, fpca: FpcaModel) -> int:
        return fpca.n_full

    def kernel_parameters(self) -> List[ParameterSpec]:
        return [ParameterSpec(f"sigma_pc_{k + 1}", Transform.LOG, "length_scale") for k in range(self.n_scores)]

    def features(self, data: Dataset) -> np.ndarray:
        self.check_grid(data)
        return self.fpca.transform(data.inputs, self.n_scores)

    def coefficients(self, kernel_theta: np.ndarray) -> np.ndarray:
        return np.asarray(kernel_theta) ** -2

    def coefficient_vjp(self, kernel_theta: np.ndarray, grad_c: np.ndarray) -> np.ndarray:
        return -2.0 * np.asarray(kernel_theta) ** -3 * grad_c

    def monitored_weights(self, kernel_theta: np.ndarray) -> np.ndarray:
        return np.asarray(kernel_theta) ** -2

    def monitored_labels(self) -> List[str]:
        return [f"inv_sigma_pc_sq_{k + 1}" for k in range(self.n_scores)]


class FPCAModel(FpcaScoreModel):
    """Components explaining the configured share of variance (99% by default)"""

    name = "FPCA"

    def _select_components(self, fpca: FpcaModel) -> int:
        return fpca.n_components(self.config.variance_threshold)


class FullFPCAModel(FpcaScoreModel):
    """Every component of the spline basis"""

    name = "FFPCA"
