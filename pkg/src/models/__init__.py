"""GP kernel models"""

from .base import BaseKernelModel, KernelSpec, ModelConfig, SIGNAL_PARAMETERS
from .factory import MODEL_NAMES, ModelFactory
from .functional import ADEModel, EdnModel, FunctionalInputModel, SDEModel
from .pca import FPCAModel, FpcaScoreModel, FullFPCAModel
from .vector import ARDModel, SquaredExponentialModel, VectorInputModel

__all__ = [
    'BaseKernelModel', 'KernelSpec', 'ModelConfig', 'SIGNAL_PARAMETERS',
    'ModelFactory', 'MODEL_NAMES',
    'SquaredExponentialModel', 'ARDModel', 'VectorInputModel',
    'FpcaScoreModel', 'FPCAModel', 'FullFPCAModel',
    'FunctionalInputModel', 'EdnModel', 'SDEModel', 'ADEModel',
]
