"""Permutation feature dynamic importance over blocks of the index space"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd

from src.dataset.loader import Dataset, IndexGrid
from src.errors import ConfigError, DataError
from src.evaluation.evaluator import ValidationStats, predictive_statistics
from src.gp.core import FittedGP

logger = logging.getLogger(__name__)

_MAX_DERANGEMENT_TRIES = 10000


@dataclass(frozen=True, eq=False)
class IndexPartition:
    """
    Intervals T_u = (e_{u-1}, e_u] for u = 1..U covering [0, 1]

    The first interval also contains t = 0.
    """
    edges: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        if edges.ndim != 1 or edges.size < 2:
            raise ConfigError("A partition needs at least two edges")
        if np.any(np.diff(edges) <= 0):
            raise ConfigError("Partition edges must be strictly increasing")
        if edges[0] != 0.0 or edges[-1] != 1.0:
            raise ConfigError(f"Partition must cover [0, 1], got [{edges[0]}, {edges[-1]}]")
        edges = edges.copy()
        edges.setflags(write=False)
        object.__setattr__(self, "edges", edges)

    @classmethod
    def equidistant(cls, U: int = 10) -> "IndexPartition":
        if U < 1:
            raise ConfigError(f"Partition size must be positive, got {U}")
        return cls(np.linspace(0.0, 1.0, U + 1))

    @property
    def U(self) -> int:
        return int(self.edges.size - 1)

    def bounds(self, u: int):
        self._check(u)
        return float(self.edges[u - 1]), float(self.edges[u])

    def membership(self, grid: IndexGrid) -> np.ndarray:
        """Interval number (1..U) of every grid point"""
        return np.maximum(np.searchsorted(self.edges, grid.t, side="left"), 1)

    def mask(self, grid: IndexGrid, u: int) -> np.ndarray:
        self._check(u)
        return self.membership(grid) == u

    def _check(self, u: int) -> None:
        if not 1 <= u <= self.U:
            raise ConfigError(f"Interval number must be in 1..{self.U}, got {u}")


def derangement(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform random permutation without fixed points, by rejection"""
    if n < 2:
        raise DataError(f"Cannot derange fewer than 2 rows, got {n}")
    for _ in range(_MAX_DERANGEMENT_TRIES):
        perm = rng.permutation(n)
        if not np.any(perm == np.arange(n)):
            return perm
    raise DataError(f"No derangement of {n} rows found")


def corrupt(inputs: np.ndarray, grid: IndexGrid, partition: IndexPartition, u: int,
            seed: Union[int, np.random.Generator]) -> np.ndarray:
    """
    Replace the columns of block T_u by a row-deranged copy

    Args:
        inputs: N x K test profiles
        grid: index grid of the profiles
        partition: index partition
        u: interval number in 1..U
        seed: integer seed or generator for the permutation

    Returns:
        New N x K matrix; columns outside T_u are unchanged
    """
    inputs = np.asarray(inputs, dtype=float)
    columns = partition.mask(grid, u)
    corrupted = inputs.copy()
    if not columns.any():
        return corrupted
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    perm = derangement(inputs.shape[0], rng)
    corrupted[:, columns] = inputs[perm][:, columns]
    return corrupted


def normalize_profile(delta: np.ndarray) -> np.ndarray:
    """Scale to a maximum of 1; all zeros when no deterioration is positive"""
    delta = np.asarray(delta, dtype=float)
    peak = np.max(delta) if delta.size else 0.0
    return delta / peak if peak > 0 else np.zeros_like(delta)


@dataclass
class PfdiResult:
    partition: IndexPartition
    delta_rmse: np.ndarray
    delta_neg_ppld: np.ndarray
    reference: Optional[ValidationStats] = None
    n_points: Optional[np.ndarray] = None

    @property
    def normalized(self) -> np.ndarray:
        return normalize_profile(self.delta_neg_ppld)

    @property
    def normalized_rmse(self) -> np.ndarray:
        return normalize_profile(self.delta_rmse)

    def to_frame(self) -> pd.DataFrame:
        u = np.arange(1, self.partition.U + 1)
        return pd.DataFrame({
            "u": u,
            "lower": self.partition.edges[:-1],
            "upper": self.partition.edges[1:],
            "n_points": self.n_points if self.n_points is not None else np.full(u.size, -1),
            "delta_rmse": self.delta_rmse,
            "delta_neg_ppld": self.delta_neg_ppld,
            "normalized_rmse": self.normalized_rmse,
            "normalized": self.normalized,
        })


def pfdi(fit: FittedGP, test: Dataset, partition: IndexPartition, n_perms: int = 1,
         seed: Union[int, Sequence[int]] = 0) -> PfdiResult:
    """
    Deterioration of RMSE and negPPLD when each index block of the test inputs is permuted

    Each (u, replicate) uses its own stream seeded by (*seed, u, replicate).

    Args:
        fit: fitted vector-input GP (SE or ARD)
        test: uncorrupted test data
        partition: index partition
        n_perms: permutations averaged per block
        seed: screening seed, or seed entropy such as (master seed, stream, h, p, q)

    Returns:
        PfdiResult with one entry per interval
    """
    model = fit.spec.model
    if not getattr(model, "supports_screening", False):
        raise ConfigError(f"PFDI needs a per-coordinate length-scale model (SE or ARD), got {model.name}")
    if n_perms < 1:
        raise ConfigError(f"n_perms must be positive, got {n_perms}")

    entropy = [int(seed)] if np.ndim(seed) == 0 else [int(s) for s in seed]
    reference = predictive_statistics(fit.predict(test), test.outputs)
    membership = partition.membership(test.grid)
    delta_rmse = np.zeros(partition.U)
    delta_neg_ppld = np.zeros(partition.U)
    for u in range(1, partition.U + 1):
        if not np.any(membership == u):
            continue
        replicates = []
        for r in range(n_perms):
            rng = np.random.default_rng([*entropy, u, r])
            corrupted = test.with_inputs(corrupt(test.inputs, test.grid, partition, u, rng))
            replicates.append(predictive_statistics(fit.predict(corrupted), test.outputs))
        delta_rmse[u - 1] = np.mean([s.rmse for s in replicates]) - reference.rmse
        delta_neg_ppld[u - 1] = np.mean([s.neg_ppld for s in replicates]) - reference.neg_ppld
        logger.debug(f"PFDI u={u}: delta rmse {delta_rmse[u - 1]:.4g}, delta negPPLD {delta_neg_ppld[u - 1]:.4g}")

    counts = np.array([int(np.sum(membership == u)) for u in range(1, partition.U + 1)])
    return PfdiResult(partition, delta_rmse, delta_neg_ppld, reference, counts)


def average_results(results: Sequence[PfdiResult]) -> PfdiResult:
    """Average deterioration profiles over subsets sharing one partition"""
    if not results:
        raise ConfigError("No PFDI results to average")
    partition = results[0].partition
    if any(not np.array_equal(r.partition.edges, partition.edges) for r in results):
        raise ConfigError("PFDI results use different partitions")
    return PfdiResult(
        partition,
        np.mean([r.delta_rmse for r in results], axis=0),
        np.mean([r.delta_neg_ppld for r in results], axis=0),
        None,
        results[0].n_points,
    )


def overlay_frame(grid: IndexGrid, weight_mean: Optional[np.ndarray], result: PfdiResult) -> pd.DataFrame:
    """Grid-aligned series (t, E[omega(t)|y], u, g) for comparing weights with PFDI"""
    membership = result.partition.membership(grid)
    weights = np.full(grid.K, np.nan) if weight_mean is None else np.asarray(weight_mean, dtype=float)
    return pd.DataFrame({
        "t": grid.t,
        "omega_mean": weights,
        "u": membership,
        "g": result.normalized[membership - 1],
    })
