import numpy as np
import pandas as pd
import pytest

from conftest import prepared, random_params, smooth_profiles
from src.dataset.loader import Dataset, IndexGrid
from src.errors import ConfigError, DataError
from src.gp.core import FittedGP
from src.models.base import KernelSpec
from src.priors.layout import ParamVector
from src.screening import (
    IndexPartition, PfdiResult, average_results, corrupt, derangement, normalize_profile, overlay_frame, pfdi,
)


def test_partition_membership_includes_left_end():
    partition = IndexPartition.equidistant(4)
    grid = IndexGrid(np.array([0.0, 0.1, 0.25, 0.26, 0.5, 0.9, 1.0]))
    np.testing.assert_array_equal(partition.membership(grid), [1, 1, 1, 2, 2, 4, 4])
    assert partition.bounds(2) == (0.25, 0.5)
    assert partition.mask(grid, 3).sum() == 0


@pytest.mark.parametrize("edges", [[0.0], [0.0, 0.5, 0.4, 1.0], [0.1, 1.0], [0.0, 0.9]])
def test_invalid_partitions(edges):
    with pytest.raises(ConfigError):
        IndexPartition(np.array(edges))


def test_interval_number_checked():
    with pytest.raises(ConfigError):
        IndexPartition.equidistant(3).mask(IndexGrid.uniform(5), 4)
    with pytest.raises(ConfigError):
        IndexPartition.equidistant(0)


def test_derangement_has_no_fixed_points(rng):
    for n in (2, 3, 10):
        perm = derangement(n, rng)
        assert sorted(perm) == list(range(n))
        assert not np.any(perm == np.arange(n))
    with pytest.raises(DataError):
        derangement(1, rng)


def test_corrupt_touches_only_one_block(rng):
    grid = IndexGrid.uniform(12)
    partition = IndexPartition.equidistant(4)
    inputs = smooth_profiles(rng, 6, grid)
    corrupted = corrupt(inputs, grid, partition, 2, seed=5)
    columns = partition.mask(grid, 2)
    np.testing.assert_array_equal(corrupted[:, ~columns], inputs[:, ~columns])
    # rows of the block are permuted as whole rows
    block = corrupted[:, columns]
    assert not np.array_equal(block, inputs[:, columns])
    assert sorted(map(tuple, block)) == sorted(map(tuple, inputs[:, columns]))
    np.testing.assert_array_equal(corrupt(inputs, grid, partition, 2, seed=5), corrupted)


def test_normalize_profile():
    np.testing.assert_allclose(normalize_profile(np.array([0.5, 2.0, -1.0])), [0.25, 1.0, -0.5])
    np.testing.assert_array_equal(normalize_profile(np.array([-0.1, 0.0])), [0.0, 0.0])


@pytest.fixture
def screening_problem(rng, small_grid):
    inputs = smooth_profiles(rng, 16, small_grid)
    outputs = np.sin(3 * inputs[:, 2]) + 0.05 * rng.normal(size=16)
    data = Dataset(inputs, small_grid, outputs, "X")
    train, test = data.subset(range(10)), data.subset(range(10, 16))
    model = prepared("ARD", train)
    return model, train, test


def ard_fit(model, train, rng, ignored_columns=()):
    values = random_params(model, rng).as_dict()
    for k in ignored_columns:
        values[f"sigma_x_{k + 1}"] = 1e6
    return FittedGP.fit(KernelSpec(model, ParamVector.from_dict(model.layout, values)), train)


def test_ignored_block_does_not_deteriorate(screening_problem, rng, small_grid):
    model, train, test = screening_problem
    partition = IndexPartition.equidistant(3)
    ignored = np.flatnonzero(partition.mask(small_grid, 3))
    result = pfdi(ard_fit(model, train, rng, ignored), test, partition, n_perms=2, seed=11)
    assert result.delta_rmse[2] == pytest.approx(0.0, abs=1e-6)
    assert result.delta_neg_ppld[2] == pytest.approx(0.0, abs=1e-6)
    assert result.n_points.sum() == small_grid.K
    assert result.reference is not None


def test_pfdi_is_deterministic(screening_problem, rng):
    model, train, test = screening_problem
    fit = ard_fit(model, train, rng)
    partition = IndexPartition.equidistant(4)
    first = pfdi(fit, test, partition, seed=3)
    second = pfdi(fit, test, partition, seed=3)
    np.testing.assert_array_equal(first.delta_neg_ppld, second.delta_neg_ppld)
    np.testing.assert_array_equal(first.delta_rmse, second.delta_rmse)
    frame = first.to_frame()
    assert list(frame["u"]) == [1, 2, 3, 4]
    assert frame["normalized"].max() in (0.0, 1.0)


def test_pfdi_rejects_functional_models(screening_problem, rng):
    _, train, test = screening_problem
    model = prepared("SDE", train)
    fit = FittedGP.fit(KernelSpec(model, random_params(model, rng)), train)
    with pytest.raises(ConfigError):
        pfdi(fit, test, IndexPartition.equidistant(2))


def test_pfdi_rejects_nonpositive_replicates(screening_problem, rng):
    model, train, test = screening_problem
    with pytest.raises(ConfigError):
        pfdi(ard_fit(model, train, rng), test, IndexPartition.equidistant(2), n_perms=0)


def test_average_results():
    partition = IndexPartition.equidistant(2)
    a = PfdiResult(partition, np.array([1.0, 0.0]), np.array([2.0, 1.0]))
    b = PfdiResult(partition, np.array([3.0, 2.0]), np.array([0.0, 1.0]))
    averaged = average_results([a, b])
    np.testing.assert_array_equal(averaged.delta_rmse, [2.0, 1.0])
    np.testing.assert_array_equal(averaged.normalized, [1.0, 1.0])
    with pytest.raises(ConfigError):
        average_results([a, PfdiResult(IndexPartition.equidistant(3), np.zeros(3), np.zeros(3))])
    with pytest.raises(ConfigError):
        average_results([])


def test_overlay_frame():
    grid = IndexGrid.uniform(5)
    result = PfdiResult(IndexPartition.equidistant(2), np.zeros(2), np.array([0.5, 1.0]))
    frame = overlay_frame(grid, np.linspace(0, 1, 5), result)
    assert list(frame.columns) == ["t", "omega_mean", "u", "g"]
    np.testing.assert_array_equal(frame["u"], [1, 1, 1, 2, 2])
    np.testing.assert_allclose(frame["g"], [0.5, 0.5, 0.5, 1.0, 1.0])
    assert pd.isna(overlay_frame(grid, None, result)["omega_mean"]).all()


def test_seed_entropy_selects_the_stream(screening_problem, rng):
    model, train, test = screening_problem
    fit = ard_fit(model, train, rng)
    partition = IndexPartition.equidistant(4)
    np.testing.assert_array_equal(pfdi(fit, test, partition, seed=3).delta_rmse,
                                  pfdi(fit, test, partition, seed=[3]).delta_rmse)
    first = pfdi(fit, test, partition, seed=[3, 5, 1, 1, 0])
    second = pfdi(fit, test, partition, seed=[3, 5, 2, 1, 0])
    assert not np.array_equal(first.delta_neg_ppld, second.delta_neg_ppld)
