import numpy as np
import pytest

from src.dataset.loader import Dataset, DatasetLoader, FunctionalSample, IndexGrid
from src.dataset.partition import partition, partition_indices
from src.dataset.scaling import (
    DEFAULT_SCALING_TABLE, ScalingBounds, ScalingEntry, denormalize, index_from_pressure, normalize,
)
from src.dataset.synthetic import SimulationSpec, simulate
from src.errors import ConfigError, DataError, ShapeError


def test_normalize_maps_bounds_to_unit_interval():
    bounds = ScalingBounds(-2.0, 6.0)
    np.testing.assert_allclose(normalize([-2.0, 2.0, 6.0], bounds), [0.0, 0.5, 1.0])


def test_normalize_keeps_out_of_range_values(caplog):
    x = normalize([7.0], ScalingBounds(0.0, 5.0), name="H2O")
    assert x[0] == pytest.approx(1.4)
    assert "outside the scaling bounds" in caplog.text


def test_denormalize_inverts_normalize():
    bounds = DEFAULT_SCALING_TABLE["Temp"].value_bounds
    z = np.array([4.6, 5.0, 5.7])
    np.testing.assert_allclose(denormalize(normalize(z, bounds), bounds), z)


def test_degenerate_bounds_rejected():
    with pytest.raises(ConfigError):
        ScalingBounds(1.0, 1.0)


def test_non_finite_values_rejected():
    with pytest.raises(DataError):
        normalize([np.nan], ScalingBounds(0.0, 1.0))


def test_pressure_grid_orientation():
    # -log10(100 hPa) = -2 and -log10(0.01 hPa) = 2 bracket the index bounds
    grid = index_from_pressure([100.0, 1.0, 0.01], ScalingBounds(-2.0, 2.0))
    np.testing.assert_allclose(grid.t, [0.0, 0.5, 1.0])


def test_nonpositive_pressure_rejected():
    with pytest.raises(DataError):
        index_from_pressure([10.0, 0.0], ScalingBounds(-2.0, 2.0))


def test_scaling_entry_round_trip():
    entry = DEFAULT_SCALING_TABLE["H2O"]
    assert ScalingEntry.from_dict(entry.to_dict()) == entry
    with pytest.raises(ConfigError):
        ScalingEntry.from_dict({"K": 3})


@pytest.mark.parametrize("values", [[0.0], [0.5, 0.2], [0.0, np.nan], [-0.5, 0.5]])
def test_invalid_grids(values):
    with pytest.raises((DataError, ShapeError)):
        IndexGrid(values)


def test_grid_is_read_only():
    grid = IndexGrid.uniform(5)
    with pytest.raises(ValueError):
        grid.t[0] = 0.3


def test_dataset_shape_checks():
    grid = IndexGrid.uniform(4)
    with pytest.raises(ShapeError):
        Dataset(np.zeros((3, 5)), grid, np.zeros(3))
    with pytest.raises(ShapeError):
        Dataset(np.zeros((3, 4)), grid, np.zeros(2))


def test_partition_is_disjoint_and_deterministic():
    pairs = partition_indices(100, H=4, n_per=10, seed=3)
    again = partition_indices(100, H=4, n_per=10, seed=3)
    rows = np.concatenate([np.concatenate([p.train, p.test]) for p in pairs])
    assert rows.size == len(np.unique(rows)) == 80
    for a, b in zip(pairs, again):
        np.testing.assert_array_equal(a.train, b.train)
        np.testing.assert_array_equal(a.test, b.test)
    assert [p.id for p in pairs] == [1, 2, 3, 4]


def test_partition_too_large():
    with pytest.raises(ConfigError):
        partition_indices(10, H=3, n_per=2, seed=0)


def test_partition_of_dataset(small_data):
    pairs = partition(small_data, H=2, n_per=2, seed=0)
    assert all(p.train.n == p.test.n == 2 for p in pairs)


def test_functional_sample_shares_rows():
    grid_a, grid_b = IndexGrid.uniform(4), IndexGrid.uniform(6)
    rows = np.arange(5, dtype=float)[:, None]
    sample = FunctionalSample({"A": (grid_a, rows + np.zeros((5, 4))), "B": (grid_b, rows + np.zeros((5, 6)))},
                              np.arange(5.0))
    sub = sample.subset([4, 1])
    np.testing.assert_array_equal(sub.dataset("A").inputs[:, 0], [4.0, 1.0])
    np.testing.assert_array_equal(sub.dataset("B").outputs, [4.0, 1.0])
    with pytest.raises(DataError):
        sample.dataset("C")


def test_profile_files_round_trip(tmp_path, small_data):
    DatasetLoader.save_profiles(tmp_path / "X.csv", small_data.grid, small_data.inputs, ["seed=1"])
    DatasetLoader.save_outputs(tmp_path / "y.csv", small_data.outputs, ["seed=1"])
    t, inputs = DatasetLoader.load_profiles(tmp_path / "X.csv")
    np.testing.assert_allclose(t, small_data.grid.t)
    np.testing.assert_allclose(inputs, small_data.inputs)
    np.testing.assert_allclose(DatasetLoader.load_outputs(tmp_path / "y.csv"), small_data.outputs)


def test_load_sample_normalizes_raw_inputs(tmp_path):
    pressures = np.array([100.0, 10.0, 1.0])
    raw = np.array([[-16.12, -10.0, -5.16], [-12.0, -11.0, -6.0]])
    np.savetxt(tmp_path / "H2O.csv", np.vstack([pressures, raw]), delimiter=",")
    (tmp_path / "y.csv").write_text("y\n1.55\n-5.27\n")

    class Source:
        path = str(tmp_path / "H2O.csv")
        scaling = "H2O"
        normalized = False

    class Settings:
        inputs = {"H2O": Source()}
        outputs = str(tmp_path / "y.csv")
        output_center = 0.55
        output_scale = 6.82

    sample = DatasetLoader.load_sample(Settings(), DEFAULT_SCALING_TABLE)
    data = sample.dataset("H2O")
    np.testing.assert_allclose(data.inputs[0, [0, 2]], [0.0, 1.0])
    np.testing.assert_allclose(data.outputs, [1.0 / 6.82, -5.82 / 6.82])
    assert np.all(np.diff(data.grid.t) > 0)


def test_simulation_is_reproducible():
    spec = SimulationSpec(n=20, k=10)
    a, b = simulate(spec, seed=5), simulate(spec, seed=5)
    np.testing.assert_array_equal(a.inputs, b.inputs)
    np.testing.assert_array_equal(a.outputs, b.outputs)
    assert not np.array_equal(a.outputs, simulate(spec, seed=6).outputs)
    assert a.inputs.shape == (20, 10)


def test_simulation_duplicate_profiles_share_signal(monkeypatch):
    from src.dataset import synthetic

    def duplicated(grid, n, length_scale, mean, sd, rng):
        base = mean + sd * rng.standard_normal((n // 2, grid.K))
        return np.vstack([base, base])

    monkeypatch.setattr(synthetic, "simulate_profiles", duplicated)
    data = simulate(SimulationSpec(n=10, k=8, sigma_eps=0.0), seed=1)
    np.testing.assert_allclose(data.outputs[:5], data.outputs[5:])


def test_simulation_spec_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        SimulationSpec.from_dict({"n": 10, "noise": 1.0})
