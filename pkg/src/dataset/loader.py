"""Dataset types and CSV ingestion"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.errors import DataError, ShapeError

logger = logging.getLogger(__name__)

# Tolerance for index values produced by floating point normalization
_GRID_TOLERANCE = 1e-9


def _readonly(values, dtype=float) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class IndexGrid:
    """Ordered index values in [0, 1] shared by every profile of one input variable"""
    t: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        if t.ndim != 1 or t.size < 2:
            raise ShapeError(f"Index grid must be a vector with at least 2 points, got shape {t.shape}")
        if not np.all(np.isfinite(t)):
            raise DataError("Index grid contains non-finite values")
        if np.any(np.diff(t) <= 0):
            raise DataError("Index grid must be strictly increasing")
        if t[0] < -_GRID_TOLERANCE or t[-1] > 1 + _GRID_TOLERANCE:
            raise DataError(f"Index grid must lie in [0, 1], got [{t[0]:.6g}, {t[-1]:.6g}]")
        object.__setattr__(self, "t", _readonly(np.clip(t, 0.0, 1.0)))

    @classmethod
    def uniform(cls, k: int) -> "IndexGrid":
        """Equally spaced grid over [0, 1] with k points"""
        return cls(np.linspace(0.0, 1.0, k))

    @property
    def K(self) -> int:
        return int(self.t.size)

    def __len__(self) -> int:
        return self.K

    def same_as(self, other: "IndexGrid") -> bool:
        return self.K == other.K and bool(np.array_equal(self.t, other.t))

    def to_list(self) -> List[float]:
        return [float(v) for v in self.t]


@dataclass(frozen=True, eq=False)
class Dataset:
    """Normalized profiles of one input variable and the scalar outputs"""
    inputs: np.ndarray
    grid: IndexGrid
    outputs: np.ndarray
    name: str = ""

    def __post_init__(self):
        inputs = np.asarray(self.inputs, dtype=float)
        outputs = np.asarray(self.outputs, dtype=float).reshape(-1)
        if inputs.ndim != 2:
            raise ShapeError(f"Inputs must be an N x K matrix, got shape {inputs.shape}")
        if inputs.shape[1] != self.grid.K:
            raise ShapeError(
                f"Inputs have {inputs.shape[1]} columns but the grid has {self.grid.K} points"
            )
        if inputs.shape[0] != outputs.size:
            raise ShapeError(
                f"Inputs have {inputs.shape[0]} rows but there are {outputs.size} outputs"
            )
        if not np.all(np.isfinite(inputs)):
            raise DataError(f"Inputs of '{self.name}' contain non-finite values")
        if not np.all(np.isfinite(outputs)):
            raise DataError(f"Outputs of '{self.name}' contain non-finite values")
        object.__setattr__(self, "inputs", _readonly(inputs))
        object.__setattr__(self, "outputs", _readonly(outputs))

    @property
    def n(self) -> int:
        return int(self.outputs.size)

    def subset(self, index: Sequence[int]) -> "Dataset":
        index = np.asarray(index, dtype=int)
        return Dataset(self.inputs[index], self.grid, self.outputs[index], self.name)

    def with_inputs(self, inputs: np.ndarray) -> "Dataset":
        """Same grid and outputs, new profile matrix"""
        return Dataset(inputs, self.grid, self.outputs, self.name)


@dataclass(frozen=True, eq=False)
class FunctionalSample:
    """Several named input variables observed on the same soundings"""
    variables: Dict[str, Tuple[IndexGrid, np.ndarray]]
    outputs: np.ndarray

    def __post_init__(self):
        outputs = _readonly(np.asarray(self.outputs, dtype=float).reshape(-1))
        object.__setattr__(self, "outputs", outputs)
        # building each Dataset validates shapes and finiteness
        for name in self.variables:
            self.dataset(name)

    @property
    def n(self) -> int:
        return int(self.outputs.size)

    @property
    def names(self) -> List[str]:
        return list(self.variables)

    def dataset(self, name: str) -> Dataset:
        if name not in self.variables:
            raise DataError(f"Unknown input variable '{name}'")
        grid, inputs = self.variables[name]
        return Dataset(inputs, grid, self.outputs, name)

    def subset(self, index: Sequence[int]) -> "FunctionalSample":
        index = np.asarray(index, dtype=int)
        return FunctionalSample(
            {name: (grid, np.asarray(inputs)[index]) for name, (grid, inputs) in self.variables.items()},
            self.outputs[index],
        )


class DatasetLoader:
    """Reads and writes the CSV layout: one file per input variable, first row is the
    index grid and every following row a profile; outputs in a single-column file."""

    @staticmethod
    def load_profiles(path: str) -> Tuple[np.ndarray, np.ndarray]:
        """
        Load one input variable

        Args:
            path: CSV file whose first row holds the grid

        Returns:
            Tuple of (grid values, N x K profile matrix)
        """
        if not Path(path).exists():
            raise FileNotFoundError(f"Input file not found: {path}")
        frame = pd.read_csv(path, header=None, comment="#")
        values = frame.apply(pd.to_numeric, errors="coerce").to_numpy(dtype=float)
        if values.shape[0] < 2:
            raise DataError(f"{path}: expected a grid row followed by at least one profile")
        grid, profiles = values[0], values[1:]
        if not np.all(np.isfinite(grid)):
            raise DataError(f"{path}: grid row contains non-numeric or non-finite values")
        if not np.all(np.isfinite(profiles)):
            bad = int(np.sum(~np.all(np.isfinite(profiles), axis=1)))
            raise DataError(f"{path}: {bad} profile row(s) contain non-numeric or non-finite values")
        return grid, profiles

    @staticmethod
    def load_outputs(path: str) -> np.ndarray:
        """Load the scalar output column, tolerating a one-line header"""
        if not Path(path).exists():
            raise FileNotFoundError(f"Output file not found: {path}")
        frame = pd.read_csv(path, header=None, comment="#")
        if frame.shape[1] != 1:
            raise DataError(f"{path}: expected a single column, found {frame.shape[1]}")
        column = pd.to_numeric(frame[0], errors="coerce")
        if column.size > 0 and np.isnan(column.iloc[0]) and not column.iloc[1:].isna().any():
            column = column.iloc[1:]
        values = column.to_numpy(dtype=float)
        if not np.all(np.isfinite(values)):
            raise DataError(f"{path}: outputs contain non-numeric or non-finite values")
        return values

    @staticmethod
    def load_sample(data_settings, scaling_table: Optional[Dict] = None) -> FunctionalSample:
        """
        Load every configured input variable and the outputs into one sample

        Args:
            data_settings: DataSettings from the experiment configuration
            scaling_table: variable name -> ScalingEntry, used for raw inputs

        Returns:
            FunctionalSample with normalized grids and profiles
        """
        from src.dataset.scaling import index_from_pressure, normalize

        scaling_table = scaling_table or {}
        outputs = DatasetLoader.load_outputs(data_settings.outputs)
        outputs = (outputs - data_settings.output_center) / data_settings.output_scale

        variables: Dict[str, Tuple[IndexGrid, np.ndarray]] = {}
        for name, source in data_settings.inputs.items():
            grid_values, profiles = DatasetLoader.load_profiles(source.path)
            if source.normalized:
                grid = IndexGrid(grid_values)
            else:
                key = source.scaling or name
                if key not in scaling_table:
                    raise DataError(f"No scaling bounds configured for raw input '{name}' (key '{key}')")
                entry = scaling_table[key]
                grid = index_from_pressure(grid_values, entry.index_bounds)
                profiles = normalize(profiles, entry.value_bounds, name=name)
            if profiles.shape[0] != outputs.size:
                raise ShapeError(
                    f"Input '{name}' has {profiles.shape[0]} profiles but there are {outputs.size} outputs"
                )
            variables[name] = (grid, profiles)
            logger.info(f"Loaded input '{name}': N={profiles.shape[0]}, K={grid.K}")

        return FunctionalSample(variables, outputs)

    @staticmethod
    def save_profiles(path: Path, grid: IndexGrid, inputs: np.ndarray,
                      header_lines: Iterable[str] = ()) -> None:
        """Write one input variable in the CSV layout read by load_profiles"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        frame = pd.DataFrame(np.vstack([grid.t, inputs]))
        with open(path, "w", encoding="utf-8", newline="") as f:
            for line in header_lines:
                f.write(f"# {line}\n")
            frame.to_csv(f, header=False, index=False)

    @staticmethod
    def save_outputs(path: Path, outputs: np.ndarray, header_lines: Iterable[str] = ()) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            for line in header_lines:
                f.write(f"# {line}\n")
            pd.DataFrame({"y": outputs}).to_csv(f, index=False)
