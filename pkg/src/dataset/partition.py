"""Random train/test subset pairs"""

import logging
from dataclasses import dataclass
from typing import List

import numpy as np

from src.dataset.loader import Dataset
from src.errors import ConfigError

logger = logging.getLogger(__name__)

# Stream tag separating partition draws from every other use of the master seed
PARTITION_STREAM = 0


@dataclass(frozen=True, eq=False)
class SubsetIndex:
    """Row indices of one training/test pair, h counted from 1"""
    id: int
    train: np.ndarray
    test: np.ndarray


@dataclass(frozen=True, eq=False)
class SubsetPair:
    id: int
    train: Dataset
    test: Dataset


def partition_indices(n_source: int, H: int, n_per: int, seed: int) -> List[SubsetIndex]:
    """
    Draw 2H disjoint blocks of n_per rows; block h trains and block h + H tests

    Args:
        n_source: number of rows available
        H: number of pairs
        n_per: rows per block
        seed: master seed

    Returns:
        List of H SubsetIndex objects with sorted, pairwise disjoint indices
    """
    if H < 1 or n_per < 1:
        raise ConfigError(f"Partition needs H >= 1 and n_per >= 1, got H={H}, n_per={n_per}")
    needed = 2 * H * n_per
    if needed > n_source:
        raise ConfigError(
            f"Partition needs 2*H*n_per = {needed} rows but the source has {n_source}"
        )
    rng = np.random.default_rng([seed, PARTITION_STREAM])
    blocks = rng.permutation(n_source)[:needed].reshape(2 * H, n_per)
    pairs = [
        SubsetIndex(h + 1, np.sort(blocks[h]), np.sort(blocks[H + h]))
        for h in range(H)
    ]
    logger.info(f"Partitioned {n_source} rows into {H} pair(s) of ({n_per}, {n_per})")
    return pairs


def partition(source: Dataset, H: int, n_per: int, seed: int) -> List[SubsetPair]:
    return [
        SubsetPair(index.id, source.subset(index.train), source.subset(index.test))
        for index in partition_indices(source.n, H, n_per, seed)
    ]
