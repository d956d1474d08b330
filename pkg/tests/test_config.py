import json

import pytest

from src.config import ConfigLoader, ExperimentConfig
from src.errors import ConfigError


def write_config(tmp_path, data):
    path = tmp_path / "experiment.json"
    path.write_text(json.dumps(data))
    return path


def small_config(**overrides):
    data = {
        "seed": 7,
        "models": ["ARD", "SDE"],
        "simulation": {"n": 40, "k": 10},
        "mcmc": {"n_random": 20, "n_opts": 2, "warmup": 20, "M": 40},
        "partition": {"H": 2, "n_per": 10},
        "validation": {"n_thin": 10},
    }
    data.update(overrides)
    return data


def test_defaults_need_a_seed():
    config = ExperimentConfig()
    issues = config.validate()
    assert any("seed" in issue for issue in issues)
    config.seed = 3
    config.simulation.n = 2 * config.partition.H * config.partition.n_per
    assert config.validate() == []


def test_load_and_validate(tmp_path):
    loader = ConfigLoader(str(write_config(tmp_path, small_config())))
    config = loader.config
    assert config.seed == 7
    assert config.mcmc.seed == 7
    assert config.models == ["ARD", "SDE"]
    assert config.partition.H == 2
    assert loader.validate() == []


def test_missing_file_and_bad_json(tmp_path):
    with pytest.raises(FileNotFoundError):
        ConfigLoader(str(tmp_path / "absent.json"))
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        ConfigLoader(str(path))


@pytest.mark.parametrize("data", [
    {"seed": 1, "colour": "red"},
    {"seed": 1, "mcmc": {"chains": 4}},
    {"seed": 1, "partition": {"folds": 3}},
    {"seed": 1, "simulation": {"noise": 0.1}},
    {"seed": 1, "data": {"format": "csv"}},
    {"seed": "abc"},
])
def test_unknown_or_malformed_settings(data):
    with pytest.raises(ConfigError):
        ConfigLoader.parse(data)


def test_inactive_models_are_skipped():
    config = ConfigLoader.parse({"models": [{"name": "SE", "active": False}, {"name": "ARD"}, "Edn"]})
    assert config.models == ["ARD", "Edn"]


def test_environment_substitution(tmp_path, monkeypatch):
    monkeypatch.setenv("ADRD_TEST_DIR", str(tmp_path))
    monkeypatch.delenv("ADRD_UNSET_VAR", raising=False)
    data = small_config(output_dir="${ADRD_TEST_DIR}/out",
                        data={"source": "files", "inputs": {"X": "${ADRD_UNSET_VAR}"}, "outputs": "y.csv"})
    config = ConfigLoader(str(write_config(tmp_path, data))).config
    assert config.output_dir == f"{tmp_path}/out"
    assert config.data.inputs["X"].path is None
    issues = config.validate("fit")
    assert any("has no path" in issue for issue in issues)
    assert any("Output file not found" in issue for issue in issues)
    # simulate does not read data files
    assert not any("not found" in issue for issue in config.validate("simulate"))


def test_validation_issues():
    config = ConfigLoader.parse(small_config(
        models=["SE", "XYZ", "SE"],
        jobs=0,
        validation={"n_thin": 1000, "thinning": "random"},
        screening={"model": "SDE"},
        priors={"priors": {"tau": {"family": "Cauchy"}}},
    ))
    issues = " | ".join(config.validate())
    for fragment in ("jobs", "XYZ", "duplicates", "n_thin", "thinning", "screening.model", "Cauchy"):
        assert fragment in issues


def test_partition_must_fit_simulation():
    config = ConfigLoader.parse(small_config(partition={"H": 3, "n_per": 10}))
    assert any("2*H*n_per" in issue for issue in config.validate())


def test_config_hash_ignores_output_and_jobs():
    first = ConfigLoader.parse(small_config())
    second = ConfigLoader.parse(small_config(output_dir="elsewhere", jobs=8))
    assert first.config_hash() == second.config_hash()
    assert len(first.config_hash()) == 64
    changed = ConfigLoader.parse(small_config(seed=8))
    assert changed.config_hash() != first.config_hash()
    assert first.header_lines() == [f"config_hash={first.config_hash()}", "seed=7"]


def test_command_line_overrides(tmp_path):
    loader = ConfigLoader(str(write_config(tmp_path, small_config())))
    config = loader.apply_overrides(seed=99, jobs=4, output_dir=str(tmp_path / "run"))
    assert (config.seed, config.mcmc.seed, config.jobs) == (99, 99, 4)
    assert config.output_dir == str(tmp_path / "run")
    unchanged = loader.apply_overrides()
    assert unchanged.seed == 99
