"""Base module for GP kernel models"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np

from src.dataset.loader import Dataset, IndexGrid
from src.errors import ConfigError, ShapeError
from src.priors.layout import ParameterLayout, ParameterSpec, ParamVector, Transform

logger = logging.getLogger(__name__)

SIGNAL_PARAMETERS = [
    ParameterSpec("sigma_f", Transform.LOG, "sigma_f"),
    ParameterSpec("sigma_eps", Transform.LOG, "sigma_eps"),
]


@dataclass
class ModelConfig:
    """Configuration for kernel models"""
    name: str
    n_basis: int = 12
    variance_threshold: float = 0.99


class BaseKernelModel(ABC):
    """
    Abstract base class for kernel models

    Every model expresses its distance as sum_k c_k (a_ik - a_jk)^2 over a feature
    matrix a; subclasses supply the features, the coefficients c as a function of
    the kernel parameters, and the vector-Jacobian product of that map.
    """

    name: str = ""
    family: str = ""
    supports_screening: bool = False

    def __init__(self, config: ModelConfig):
        self.config = config
        self._grid: Optional[IndexGrid] = None
        self._layout: Optional[ParameterLayout] = None

    def prepare(self, train: Dataset) -> "BaseKernelModel":
        """Bind the model to a training grid and fix its parameter layout"""
        self._grid = train.grid
        self._prepare_features(train)
        self._layout = ParameterLayout(self.kernel_parameters() + SIGNAL_PARAMETERS)
        logger.debug(f"{self.name}: prepared with parameters {self._layout.names}")
        return self

    def _prepare_features(self, train: Dataset) -> None:
        pass

    @property
    def is_prepared(self) -> bool:
        return self._layout is not None

    @property
    def layout(self) -> ParameterLayout:
        if self._layout is None:
            raise ConfigError(f"Model {self.name} has not been prepared on training data")
        return self._layout

    @property
    def grid(self) -> IndexGrid:
        if self._grid is None:
            raise ConfigError(f"Model {self.name} has not been prepared on training data")
        return self._grid

    @property
    def n_kernel(self) -> int:
        return self.layout.size - len(SIGNAL_PARAMETERS)

    def check_grid(self, data: Dataset) -> None:
        if not self.grid.same_as(data.grid):
            raise ShapeError(f"{self.name}: dataset grid does not match the training grid")

    @abstractmethod
    def kernel_parameters(self) -> List[ParameterSpec]:
        """Free kernel parameters, excluding sigma_f and sigma_eps"""
        pass

    @abstractmethod
    def features(self, data: Dataset) -> np.ndarray:
        """Feature matrix the distance is computed on"""
        pass

    @abstractmethod
    def coefficients(self, kernel_theta: np.ndarray) -> np.ndarray:
        """Distance coefficients c for the kernel parameters"""
        pass

    @abstractmethod
    def coefficient_vjp(self, kernel_theta: np.ndarray, grad_c: np.ndarray) -> np.ndarray:
        """Pull a gradient with respect to c back to the kernel parameters"""
        pass

    @abstractmethod
    def monitored_weights(self, kernel_theta: np.ndarray) -> np.ndarray:
        """Relevance weights tracked by the convergence diagnostics"""
        pass

    @abstractmethod
    def monitored_labels(self) -> List[str]:
        pass

    def derived_columns(self, kernel_theta: np.ndarray) -> Dict[str, np.ndarray]:
        """Extra posterior columns computed from an M x n_kernel matrix of draws"""
        return {}

    def describe(self) -> Dict[str, Any]:
        return {"name": self.name, "family": self.family, "parameters": self.layout.names}


class KernelSpec:
    """A prepared model together with one constrained parameter vector"""

    def __init__(self, model: BaseKernelModel, params: ParamVector):
        if params.layout is not model.layout:
            raise ShapeError(f"Parameters do not belong to the layout of {model.name}")
        self.model = model
        self.params = params

    @classmethod
    def from_dict(cls, model: BaseKernelModel, values: Dict[str, float]) -> "KernelSpec":
        return cls(model, ParamVector.from_dict(model.layout, values))

    @property
    def sigma_f(self) -> float:
        return self.params["sigma_f"]

    @property
    def sigma_eps(self) -> float:
        return self.params["sigma_eps"]

    @property
    def kernel_theta(self) -> np.ndarray:
        return self.params.values[:self.model.n_kernel]

    def coefficients(self) -> np.ndarray:
        return self.model.coefficients(self.kernel_theta)

    def in_support(self) -> bool:
        return self.params.in_support()

    def __repr__(self) -> str:
        return f"KernelSpec({self.model.name}, {self.params!r})"
