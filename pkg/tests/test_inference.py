import numpy as np
import pytest

from src.errors import ConfigError, InitializationError
from src.gp.posterior import PosteriorTarget
from src.inference.metropolis import run_rwm
from src.inference.nuts import DualAveraging, NutsSampler, WelfordVariance, run_nuts
from src.inference.pipeline import McmcConfig, fit_model
from src.inference.samples import PosteriorSample
from src.inference.search import multistart_optimize, random_search
from src.models.factory import ModelFactory
from src.priors.layout import ParameterLayout, ParameterSpec, Transform

SCALES = np.array([1.0, 3.0])


def gaussian(u):
    return float(-0.5 * np.sum((u / SCALES) ** 2)), -u / SCALES ** 2


def tiny_config(**overrides):
    settings = dict(n_random=40, n_opts=3, warmup=60, M=60, max_treedepth=6, max_iter=50)
    settings.update(overrides)
    return McmcConfig(**settings)


def test_nuts_recovers_gaussian_moments():
    chain = run_nuts(gaussian, np.zeros(2), warmup=400, n_samples=2000, rng=np.random.default_rng(0))
    assert chain.u.shape == (2000, 2)
    np.testing.assert_allclose(chain.u.mean(axis=0), 0.0, atol=0.25)
    np.testing.assert_allclose(chain.u.std(axis=0), SCALES, rtol=0.15)
    assert not chain.divergent.any()
    assert 0.6 < chain.accept_stats.mean() < 0.97
    # the adapted metric follows the target variances
    assert chain.inv_metric[1] > chain.inv_metric[0]


def test_nuts_is_reproducible():
    a = run_nuts(gaussian, np.ones(2), 50, 50, np.random.default_rng(4))
    b = run_nuts(gaussian, np.ones(2), 50, 50, np.random.default_rng(4))
    np.testing.assert_array_equal(a.u, b.u)
    assert a.step_size == b.step_size


def test_nuts_rejects_bad_start():
    def nowhere(u):
        return -np.inf, np.zeros_like(u)

    with pytest.raises(InitializationError):
        run_nuts(nowhere, np.zeros(1), 10, 10, np.random.default_rng(0))


def test_huge_step_is_divergent():
    sampler = NutsSampler(gaussian, np.random.default_rng(1), max_treedepth=5)
    u = np.array([5.0, 5.0])
    log_p, grad = gaussian(u)
    *_, info = sampler.transition(u, log_p, grad, 1e3, np.ones(2))
    assert info.divergent


def test_treedepth_is_capped():
    sampler = NutsSampler(gaussian, np.random.default_rng(2), max_treedepth=2)
    log_p, grad = gaussian(np.zeros(2))
    *_, info = sampler.transition(np.zeros(2), log_p, grad, 1e-4, np.ones(2))
    assert info.treedepth == 2
    assert info.n_leapfrog == 3


def test_dual_averaging_moves_toward_target():
    averager = DualAveraging(1.0, target=0.8)
    for _ in range(20):
        step = averager.update(0.2)
    assert step < 1.0
    averager.restart(1.0)
    for _ in range(20):
        step = averager.update(1.0)
    assert step > 1.0


def test_welford_matches_numpy(rng):
    x = rng.normal(size=(200, 3)) * [1.0, 2.0, 0.5]
    variance = WelfordVariance(3)
    for row in x:
        variance.add(row)
    expected = (200 / 205) * np.var(x, axis=0, ddof=1) + 1e-3 * 5 / 205
    np.testing.assert_allclose(variance.regularized(), expected)


def test_rwm_targets_gaussian():
    chain = run_rwm(gaussian, np.zeros(2), 1000, 4000, np.random.default_rng(3))
    assert chain.sampler == "rwm"
    np.testing.assert_allclose(chain.u.mean(axis=0), 0.0, atol=0.5)
    np.testing.assert_allclose(chain.u.std(axis=0), SCALES, rtol=0.25)
    assert 0.1 < chain.accept_stats.mean() < 0.5


def sample_for(layout, m=300, seed=0):
    rng = np.random.default_rng(seed)
    draws = np.abs(rng.normal(size=(m, layout.size))) + 0.1
    return PosteriorSample(layout, draws, rng.normal(size=m), rng.uniform(size=m),
                           np.full(m, 3), np.full(m, 7), np.zeros(m, dtype=bool), 0.25)


LAYOUT = ParameterLayout([ParameterSpec("sigma_f", Transform.LOG, "sigma_f"),
                          ParameterSpec("sigma_eps", Transform.LOG, "sigma_eps")])


def test_systematic_thinning_keeps_block_ends():
    sample = sample_for(LAYOUT, m=300)
    thinned = sample.thin(100)
    assert thinned.M == 100
    np.testing.assert_array_equal(thinned.draws[0], sample.draws[2])
    np.testing.assert_array_equal(thinned.draws[-1], sample.draws[299])
    assert sample.thin(300).M == 300


def test_batch_thinning():
    sample = sample_for(LAYOUT, m=1500)
    thinned = sample.thin(100, method="batch", batch_size=150, rng=np.random.default_rng(0))
    assert thinned.M == 100
    with pytest.raises(ConfigError):
        sample.thin(100, method="batch")
    with pytest.raises(ConfigError):
        sample.thin(0)
    with pytest.raises(ConfigError):
        sample.thin(10, method="stratified")


def test_sample_csv_round_trip(tmp_path):
    sample = sample_for(LAYOUT, m=30)
    path = tmp_path / "posterior.csv"
    sample.save_csv(path, ["config_hash=abc", "seed=1"])
    loaded = PosteriorSample.load_csv(path, LAYOUT)
    np.testing.assert_array_equal(loaded.draws, sample.draws)
    np.testing.assert_array_equal(loaded.log_posts, sample.log_posts)
    assert loaded.step_size == sample.step_size
    assert "stn" in sample.to_frame().columns
    assert path.read_text().startswith("# config_hash=abc\n# seed=1\n")


def test_random_search_and_optimization(small_data, priors):
    model = ModelFactory.create("SDE").prepare(small_data)
    target = PosteriorTarget(model, small_data, priors)
    candidates = random_search(target, priors, 50, np.random.default_rng(0))
    scores = [c.log_posterior for c in candidates]
    assert scores == sorted(scores, reverse=True)
    best, results = multistart_optimize(candidates, 4, target, max_iter=100)
    assert len(results) == 4
    assert best.log_posterior >= scores[0]
    assert best.log_posterior == pytest.approx(target.log_posterior(best.params))


def test_fit_model_end_to_end(small_data, priors):
    cfg = tiny_config()
    model = ModelFactory.create("ADE")
    result = fit_model(model, small_data, priors, cfg, np.random.default_rng(9))
    assert result.sample.M == cfg.M
    assert result.n_candidates == cfg.n_random
    assert np.all(result.sample.draws[:, model.layout.index("tau")] <= 1.0)
    assert len(result.diagnostics.quantities) == small_data.grid.K
    derived = model.derived_columns(result.sample.draws[:, :model.n_kernel])
    np.testing.assert_allclose(derived["lambda1"] * derived["lambda2"],
                               result.sample.column("lambda") ** 2)


def test_fit_model_is_deterministic(small_data, priors):
    cfg = tiny_config(M=25, warmup=20)
    a = fit_model(ModelFactory.create("SE"), small_data, priors, cfg, np.random.default_rng(5))
    b = fit_model(ModelFactory.create("SE"), small_data, priors, cfg, np.random.default_rng(5))
    np.testing.assert_array_equal(a.sample.draws, b.sample.draws)


def test_rwm_pipeline(small_data, priors):
    result = fit_model(ModelFactory.create("SE"), small_data, priors, tiny_config(sampler="rwm"),
                       np.random.default_rng(1))
    assert result.sample.sampler == "rwm"
    assert result.sample.treedepth_hits == 0


def test_mcmc_config_validation():
    assert McmcConfig().validate() == []
    issues = McmcConfig(M=5, target_accept=1.5, sampler="hmc").validate()
    assert len(issues) == 3
    with pytest.raises(ConfigError):
        McmcConfig.from_dict({"chains": 4})
