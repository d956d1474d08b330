"""Dataset loading, scaling, partitioning and simulation"""

from .loader import Dataset, DatasetLoader, FunctionalSample, IndexGrid
from .scaling import DEFAULT_SCALING_TABLE, ScalingBounds, ScalingEntry, denormalize, index_from_pressure, normalize
from .partition import SubsetIndex, SubsetPair, partition, partition_indices
from .synthetic import SimulationSpec, simulate, simulate_profiles

__all__ = [
    'IndexGrid', 'Dataset', 'FunctionalSample', 'DatasetLoader',
    'ScalingBounds', 'ScalingEntry', 'DEFAULT_SCALING_TABLE', 'normalize', 'denormalize', 'index_from_pressure',
    'SubsetIndex', 'SubsetPair', 'partition', 'partition_indices',
    'SimulationSpec', 'simulate', 'simulate_profiles',
]
