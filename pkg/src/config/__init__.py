"""Configuration module"""

from .loader import (
    ConfigLoader, DataSettings, ExperimentConfig, FpcaSettings, InputSettings,
    PartitionSettings, ScreeningSettings, ValidationSettings,
)

__all__ = [
    "ConfigLoader", "ExperimentConfig", "DataSettings", "InputSettings", "PartitionSettings",
    "ValidationSettings", "ScreeningSettings", "FpcaSettings",
]
