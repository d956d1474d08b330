"""Shared fixtures"""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.dataset.loader import Dataset, IndexGrid
from src.dataset.synthetic import SimulationSpec, simulate
from src.models.factory import ModelFactory
from src.priors.layout import ParamVector
from src.priors.prior_set import PriorSet


def smooth_profiles(rng: np.random.Generator, n: int, grid: IndexGrid) -> np.ndarray:
    """Random low-frequency profiles in roughly [0, 1]"""
    t = grid.t
    a = rng.normal(size=(n, 3))
    return 0.5 + 0.15 * (a[:, :1] * np.sin(np.pi * t) + a[:, 1:2] * np.cos(2 * np.pi * t) + a[:, 2:] * t)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_grid():
    return IndexGrid.uniform(12)


@pytest.fixture
def small_data(rng, small_grid):
    inputs = smooth_profiles(rng, 8, small_grid)
    outputs = np.sin(3 * inputs[:, 4]) + 0.1 * rng.normal(size=8)
    return Dataset(inputs, small_grid, outputs, "X")


@pytest.fixture
def priors():
    return PriorSet()


@pytest.fixture
def synthetic_data():
    spec = SimulationSpec(n=60, k=15, sigma_eps=0.1)
    return simulate(spec, seed=7)


def prepared(name: str, data: Dataset):
    return ModelFactory.create(name, n_basis=8).prepare(data)


def random_params(model, rng: np.random.Generator) -> ParamVector:
    """A moderate in-support parameter vector for any model"""
    values = []
    for spec in model.layout.specs:
        if spec.prior_key == "tau":
            values.append(rng.uniform(0.2, 0.8))
        elif spec.prior_key == "log_kappa":
            values.append(rng.normal(scale=0.5))
        elif spec.prior_key == "lambda":
            values.append(rng.uniform(1.0, 6.0))
        elif spec.prior_key == "sigma_eps":
            values.append(rng.uniform(0.2, 0.6))
        elif spec.prior_key == "length_scale":
            values.append(rng.uniform(0.5, 2.0))
        else:
            values.append(rng.uniform(0.5, 1.5))
    return ParamVector(model.layout, values)
