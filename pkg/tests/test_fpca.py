from dataclasses import asdict

import numpy as np
import pytest

from conftest import smooth_profiles
from src.dataset.loader import Dataset, IndexGrid
from src.errors import DataError, ShapeError
from src.fpca.basis import BasisSystem, fit_basis
from src.fpca.model import FpcaModel, fit_fpca, transform
from src.models.factory import ModelFactory


@pytest.fixture
def grid():
    return IndexGrid.uniform(40)


def test_default_basis_has_twelve_cubic_functions(grid):
    basis = fit_basis(grid)
    assert basis.n_basis == 12
    interior = basis.knots[(basis.knots > 0) & (basis.knots < 1)]
    np.testing.assert_allclose(interior, np.arange(1, 9) / 9)
    # B-splines form a partition of unity
    np.testing.assert_allclose(basis.matrix.sum(axis=1), 1.0)


def test_basis_reproduces_cubics(grid):
    basis = fit_basis(grid)
    cubic = 1 - 2 * grid.t + 3 * grid.t ** 3
    np.testing.assert_allclose(basis.smooth(cubic[None, :])[0], cubic, atol=1e-10)


def test_basis_needs_enough_points():
    with pytest.raises(DataError):
        fit_basis(IndexGrid.uniform(8), n_basis=12)


def test_basis_round_trip(grid):
    basis = fit_basis(grid, n_basis=8)
    again = BasisSystem.from_dict(basis.to_dict())
    np.testing.assert_allclose(again.matrix, basis.matrix)


def test_fpca_eigen_structure(grid, rng):
    inputs = smooth_profiles(rng, 60, grid)
    model = fit_fpca(inputs, fit_basis(grid))
    assert np.all(np.diff(model.eigenvalues) <= 1e-12)
    assert np.all(model.eigenvalues >= 0)
    np.testing.assert_allclose(model.loadings.T @ model.loadings, np.eye(12), atol=1e-10)
    # profiles are spanned by three smooth functions
    assert model.n_components(0.99) <= 3
    assert model.n_components(1.0) <= model.n_full
    largest = model.loadings[np.argmax(np.abs(model.loadings), axis=0), np.arange(12)]
    assert np.all(largest > 0)


def test_scores_are_centered(grid, rng):
    inputs = smooth_profiles(rng, 30, grid)
    model = fit_fpca(inputs, fit_basis(grid))
    scores = transform(model, inputs)
    np.testing.assert_allclose(scores.mean(axis=0), 0.0, atol=1e-10)
    assert transform(model, inputs, 2).shape == (30, 2)


def test_identical_profiles_are_degenerate(grid):
    inputs = np.tile(np.linspace(0, 1, 40), (5, 1))
    model = fit_fpca(inputs, fit_basis(grid))
    assert model.degenerate
    assert model.n_components(0.99) == 1
    np.testing.assert_allclose(model.transform(inputs), 0.0, atol=1e-12)


def test_grid_mismatch(grid, rng):
    model = fit_fpca(smooth_profiles(rng, 10, grid), fit_basis(grid))
    with pytest.raises(ShapeError):
        model.check_grid(IndexGrid.uniform(41))
    with pytest.raises(ShapeError):
        transform(model, smooth_profiles(rng, 3, IndexGrid.uniform(41)))
    with pytest.raises(ShapeError):
        model.transform(np.ones((3, 12)))
    with pytest.raises(DataError):
        fit_fpca(np.ones((1, 40)), fit_basis(grid))


def test_fpca_model_round_trip(grid, rng):
    inputs = smooth_profiles(rng, 20, grid)
    model = fit_fpca(inputs, fit_basis(grid))
    again = FpcaModel.from_dict(model.to_dict())
    np.testing.assert_allclose(again.transform(inputs), model.transform(inputs))


def test_pca_models_use_training_fpca(grid, rng):
    data = Dataset(smooth_profiles(rng, 25, grid), grid, rng.normal(size=25))
    reduced = ModelFactory.create("FPCA").prepare(data)
    full = ModelFactory.create("FFPCA").prepare(data)
    assert reduced.n_scores == reduced.fpca.n_components(0.99)
    assert full.n_scores == 12
    assert reduced.layout.names[:reduced.n_scores] == [f"sigma_pc_{k + 1}" for k in range(reduced.n_scores)]
    assert reduced.features(data).shape == (25, reduced.n_scores)


def test_factory_model_config():
    model = ModelFactory.create("FPCA", n_basis=8, variance_threshold=0.9)
    assert asdict(model.config) == {"name": "FPCA", "n_basis": 8, "variance_threshold": 0.9}
