"""Configuration loader for experiments"""

import hashlib
import json
import os
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from src.dataset.scaling import DEFAULT_SCALING_TABLE, ScalingEntry
from src.dataset.synthetic import SimulationSpec
from src.errors import ConfigError
from src.inference.pipeline import McmcConfig
from src.models.factory import MODEL_NAMES
from src.priors.prior_set import PriorSet

DATA_SOURCES = ("simulation", "files")
THINNING_METHODS = ("systematic", "batch")


def _from_dict(cls, data: Optional[Dict[str, Any]], section: str):
    data = dict(data or {})
    unknown = sorted(set(data) - set(cls.__dataclass_fields__))
    if unknown:
        raise ConfigError(f"Unknown {section} settings: {', '.join(unknown)}")
    return cls(**data)


@dataclass
class InputSettings:
    """One input variable file; raw files are normalized through the scaling table"""
    path: str
    scaling: Optional[str] = None
    normalized: bool = False


@dataclass
class DataSettings:
    source: str = "simulation"
    inputs: Dict[str, InputSettings] = field(default_factory=dict)
    outputs: Optional[str] = None
    output_center: float = 0.0
    output_scale: float = 1.0

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]]) -> "DataSettings":
        data = dict(data or {})
        inputs = {
            name: _from_dict(InputSettings, spec if isinstance(spec, dict) else {"path": spec}, f"data.inputs.{name}")
            for name, spec in (data.pop("inputs", None) or {}).items()
        }
        settings = _from_dict(cls, data, "data")
        settings.inputs = inputs
        return settings


@dataclass
class PartitionSettings:
    H: int = 8
    n_per: int = 1000


@dataclass
class ValidationSettings:
    n_thin: int = 100
    thinning: str = "systematic"
    batch_size: int = 150


@dataclass
class ScreeningSettings:
    partition_size: int = 10
    edges: Optional[List[float]] = None
    n_perms: int = 1
    model: str = "ARD"
    weight_model: str = "ADE"


@dataclass
class FpcaSettings:
    n_basis: int = 12
    variance_threshold: float = 0.99


@dataclass
class ExperimentConfig:
    """Resolved experiment configuration"""
    seed: Optional[int] = None
    output_dir: str = "results"
    jobs: int = 1
    models: List[str] = field(default_factory=lambda: list(MODEL_NAMES))
    data: DataSettings = field(default_factory=DataSettings)
    scaling_bounds: Dict[str, ScalingEntry] = field(default_factory=lambda: dict(DEFAULT_SCALING_TABLE))
    simulation: SimulationSpec = field(default_factory=SimulationSpec)
    priors: Dict[str, Any] = field(default_factory=dict)
    mcmc: McmcConfig = field(default_factory=McmcConfig)
    partition: PartitionSettings = field(default_factory=PartitionSettings)
    validation: ValidationSettings = field(default_factory=ValidationSettings)
    screening: ScreeningSettings = field(default_factory=ScreeningSettings)
    fpca: FpcaSettings = field(default_factory=FpcaSettings)

    def prior_set(self) -> PriorSet:
        return PriorSet.from_dict(self.priors)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["scaling_bounds"] = {k: v.to_dict() for k, v in self.scaling_bounds.items()}
        return data

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON form; the output directory and job count are excluded"""
        data = self.to_dict()
        data.pop("output_dir")
        data.pop("jobs")
        canonical = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def header_lines(self) -> List[str]:
        return [f"config_hash={self.config_hash()}", f"seed={self.seed}"]

    def validate(self, stage: Optional[str] = None) -> List[str]:
        """Return human-readable configuration issues; empty when valid"""
        issues = []
        if self.seed is None:
            issues.append("A master seed is required (config 'seed' or --seed)")
        elif not isinstance(self.seed, int) or self.seed < 0:
            issues.append(f"Seed must be a nonnegative integer, got {self.seed!r}")
        if self.jobs < 1:
            issues.append(f"jobs must be positive, got {self.jobs}")
        if not self.models:
            issues.append("No models selected")
        unknown = [m for m in self.models if m not in MODEL_NAMES]
        if unknown:
            issues.append(f"Unknown model(s): {', '.join(unknown)}. Available: {', '.join(MODEL_NAMES)}")
        if len(set(self.models)) != len(self.models):
            issues.append("Model list contains duplicates")

        if self.data.source not in DATA_SOURCES:
            issues.append(f"data.source must be one of {DATA_SOURCES}, got '{self.data.source}'")
        if self.data.output_scale == 0:
            issues.append("data.output_scale must be nonzero")
        if self.data.source == "files" and stage != "simulate":
            if not self.data.inputs:
                issues.append("data.inputs is empty")
            if not self.data.outputs:
                issues.append("data.outputs is missing")
            elif not Path(self.data.outputs).exists():
                issues.append(f"Output file not found: {self.data.outputs}")
            for name, source in self.data.inputs.items():
                if not source.path:
                    issues.append(f"Input '{name}' has no path")
                elif not Path(source.path).exists():
                    issues.append(f"Input file not found for '{name}': {source.path}")
                if not source.normalized and (source.scaling or name) not in self.scaling_bounds:
                    issues.append(f"No scaling bounds for raw input '{name}'")
        if self.data.source == "simulation" or stage == "simulate":
            issues.extend(self.simulation.validate())

        issues.extend(self.mcmc.validate())
        if self.partition.H < 1 or self.partition.n_per < 1:
            issues.append("partition.H and partition.n_per must be positive")
        if self.data.source == "simulation" and 2 * self.partition.H * self.partition.n_per > self.simulation.n:
            issues.append(
                f"partition needs 2*H*n_per = {2 * self.partition.H * self.partition.n_per} rows, "
                f"simulation.n is {self.simulation.n}"
            )
        if self.validation.thinning not in THINNING_METHODS:
            issues.append(f"validation.thinning must be one of {THINNING_METHODS}")
        if not 1 <= self.validation.n_thin <= self.mcmc.M:
            issues.append(f"validation.n_thin must be in [1, mcmc.M={self.mcmc.M}]")
        if self.validation.batch_size < 1:
            issues.append("validation.batch_size must be positive")
        if self.screening.n_perms < 1 or self.screening.partition_size < 1:
            issues.append("screening.n_perms and screening.partition_size must be positive")
        if self.screening.model not in ("SE", "ARD"):
            issues.append(f"screening.model must be SE or ARD, got '{self.screening.model}'")
        if self.fpca.n_basis < 4 or not 0 < self.fpca.variance_threshold <= 1:
            issues.append("fpca.n_basis must be >= 4 and fpca.variance_threshold in (0, 1]")
        try:
            PriorSet.from_dict(self.priors)
        except ConfigError as e:
            issues.append(str(e))
        return issues


class ConfigLoader:
    """Loads experiment configuration from JSON"""

    def __init__(self, config_path: Optional[str] = "experiment.json"):
        self.config_path = Path(config_path) if config_path else None
        self.config = ExperimentConfig()
        if self.config_path is not None:
            self._load_config()

    def _substitute_env_vars(self, value: Any) -> Any:
        """Substitute ${VAR} patterns from the environment; unresolved placeholders become None"""
        if isinstance(value, str):
            for var_name in re.findall(r'\$\{([^}]+)\}', value):
                env_value = os.environ.get(var_name)
                if env_value:
                    value = value.replace(f'${{{var_name}}}', env_value)
            if value.startswith('${') and value.endswith('}'):
                return None
        return value

    def _process_config_dict(self, config_dict: Dict[str, Any]) -> Dict[str, Any]:
        processed = {}
        for key, value in config_dict.items():
            if isinstance(value, dict):
                processed[key] = self._process_config_dict(value)
            elif isinstance(value, list):
                processed[key] = [
                    self._process_config_dict(item) if isinstance(item, dict)
                    else self._substitute_env_vars(item)
                    for item in value
                ]
            else:
                processed[key] = self._substitute_env_vars(value)
        return processed

    def _load_config(self):
        """Load configuration from the JSON file"""
        if not self.config_path.exists():
            raise FileNotFoundError(f"Configuration file not found: {self.config_path}")
        with open(self.config_path, 'r', encoding='utf-8') as f:
            try:
                config_data = json.load(f)
            except json.JSONDecodeError as e:
                raise ConfigError(f"{self.config_path}: invalid JSON: {e}") from e
        self.config = self.parse(self._process_config_dict(config_data))

    @staticmethod
    def parse(data: Dict[str, Any]) -> ExperimentConfig:
        """Build an ExperimentConfig from a plain dictionary"""
        data = dict(data)
        known = set(ExperimentConfig.__dataclass_fields__)
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"Unknown configuration keys: {', '.join(unknown)}")

        config = ExperimentConfig()
        try:
            if "seed" in data:
                config.seed = None if data["seed"] is None else int(data["seed"])
            config.output_dir = str(data.get("output_dir", config.output_dir))
            config.jobs = int(data.get("jobs", config.jobs))
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid top-level setting: {e}") from e
        if "models" in data:
            config.models = [
                m["name"] if isinstance(m, dict) else str(m)
                for m in data["models"]
                if not isinstance(m, dict) or m.get("active", True)
            ]
        config.data = DataSettings.from_dict(data.get("data"))
        if "scaling_bounds" in data:
            config.scaling_bounds = {
                name: ScalingEntry.from_dict(entry) for name, entry in (data["scaling_bounds"] or {}).items()
            }
        config.simulation = SimulationSpec.from_dict(data.get("simulation"))
        config.priors = dict(data.get("priors") or {})
        config.mcmc = McmcConfig.from_dict(data.get("mcmc"))
        config.partition = _from_dict(PartitionSettings, data.get("partition"), "partition")
        config.validation = _from_dict(ValidationSettings, data.get("validation"), "validation")
        config.screening = _from_dict(ScreeningSettings, data.get("screening"), "screening")
        config.fpca = _from_dict(FpcaSettings, data.get("fpca"), "fpca")
        if config.mcmc.seed is None:
            config.mcmc.seed = config.seed
        return config

    def apply_overrides(self, seed: Optional[int] = None, jobs: Optional[int] = None,
                        output_dir: Optional[str] = None) -> ExperimentConfig:
        """Command-line values take precedence over the file"""
        if seed is not None:
            self.config.seed = seed
            self.config.mcmc.seed = seed
        if jobs is not None:
            self.config.jobs = jobs
        if output_dir is not None:
            self.config.output_dir = output_dir
        return self.config

    def validate(self, stage: Optional[str] = None) -> List[str]:
        return self.config.validate(stage)
