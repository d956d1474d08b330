"""Factory for creating kernel models"""

from typing import Dict, Optional, Type

from src.errors import ConfigError
from src.fpca.model import FpcaModel
from .base import BaseKernelModel, ModelConfig
from .functional import ADEModel, EdnModel, SDEModel
from .pca import FPCAModel, FullFPCAModel
from .vector import ARDModel, SquaredExponentialModel

# Canonical order; a model's position here feeds its RNG stream
MODEL_NAMES = ("SE", "ARD", "FPCA", "FFPCA", "Edn", "SDE", "ADE")

_MODELS: Dict[str, Type[BaseKernelModel]] = {
    "SE": SquaredExponentialModel,
    "ARD": ARDModel,
    "FPCA": FPCAModel,
    "FFPCA": FullFPCAModel,
    "Edn": EdnModel,
    "SDE": SDEModel,
    "ADE": ADEModel,
}


class ModelFactory:
    """Factory for creating kernel model instances"""

    @staticmethod
    def create(name: str, n_basis: int = 12, variance_threshold: float = 0.99,
               fpca: Optional[FpcaModel] = None) -> BaseKernelModel:
        if name not in _MODELS:
            raise ConfigError(f"Unknown model: {name}. Available: {', '.join(MODEL_NAMES)}")
        config = ModelConfig(name=name, n_basis=n_basis, variance_threshold=variance_threshold)
        model_class = _MODELS[name]
        if name in ("FPCA", "FFPCA"):
            return model_class(config, fpca=fpca)
        return model_class(config)

    @staticmethod
    def create_from_config(name: str, fpca_settings, fpca: Optional[FpcaModel] = None) -> BaseKernelModel:
        """Create a model using the experiment's FPCA settings"""
        return ModelFactory.create(
            name,
            n_basis=fpca_settings.n_basis,
            variance_threshold=fpca_settings.variance_threshold,
            fpca=fpca,
        )

    @staticmethod
    def model_index(name: str) -> int:
        if name not in MODEL_NAMES:
            raise ConfigError(f"Unknown model: {name}. Available: {', '.join(MODEL_NAMES)}")
        return MODEL_NAMES.index(name)
