import math

import numpy as np
import pytest
from scipy.integrate import quad

from conftest import prepared
from oracle import fd_gradient
from src.errors import ConfigError, ShapeError
from src.inference.diagnostics import mcse
from src.priors.distributions import (
    Beta, Flat, HalfCauchy, HalfNormal, InverseGamma, Normal, prior_from_dict,
)
from src.priors.layout import ParameterLayout, ParameterSpec, ParamVector, Transform
from src.priors.prior_set import PriorSet


def test_inverse_gamma_density():
    x = 0.7
    expected = 5 * math.log(5) - math.lgamma(5) - 6 * math.log(x) - 5 / x
    assert InverseGamma(5, 5).log_density(x) == pytest.approx(expected)


def test_half_normal_scale():
    s = math.sqrt(10)
    expected = math.log(2) - 0.5 * math.log(2 * math.pi) - math.log(s) - 0.5 * (3 / s) ** 2
    assert HalfNormal(s).log_density(3.0) == pytest.approx(expected)
    assert HalfNormal(1.0).log_density(-0.1) == -np.inf


@pytest.mark.parametrize("prior, x", [
    (InverseGamma(5, 5), 0.8), (Beta(2, 3), 0.3), (HalfNormal(2.0), 1.1),
    (Normal(0.5, 2.0), -0.4), (HalfCauchy(1.0), 0.9),
])
def test_gradients_match_finite_differences(prior, x):
    numeric = fd_gradient(lambda v: prior.log_density(v[0]), np.array([x]))[0]
    assert prior.grad_log_density(x) == pytest.approx(numeric, rel=1e-6)


def test_flat_prior():
    assert Flat().log_density(3.0) == 0.0
    with pytest.raises(ConfigError):
        Flat().sample(np.random.default_rng(0))


def test_prior_from_dict():
    assert prior_from_dict({"family": "normal", "loc": 1, "scale": 2}) == Normal(1.0, 2.0)
    with pytest.raises(ConfigError):
        prior_from_dict({"family": "lognormal"})
    with pytest.raises(ConfigError):
        prior_from_dict({"family": "normal", "mu": 1})


@pytest.mark.parametrize("transform, u", [(Transform.LOG, 0.3), (Transform.LOGIT, -1.2), (Transform.IDENTITY, 2.0)])
def test_transforms(transform, u):
    theta = transform.to_constrained(u)
    assert transform.to_unconstrained(theta) == pytest.approx(u)
    h = 1e-6
    slope = (transform.to_constrained(u + h) - transform.to_constrained(u - h)) / (2 * h)
    assert transform.dtheta_du(u) == pytest.approx(slope, rel=1e-6)
    assert transform.log_jacobian(u) == pytest.approx(np.log(slope), rel=1e-6, abs=1e-9)
    numeric = fd_gradient(lambda v: float(transform.log_jacobian(v[0])), np.array([u]))[0]
    assert transform.grad_log_jacobian(u) == pytest.approx(numeric, rel=1e-5, abs=1e-9)


def test_layout_checks():
    layout = ParameterLayout([ParameterSpec("a", Transform.LOG, "phi"), ParameterSpec("b", Transform.LOGIT, "tau")])
    with pytest.raises(ShapeError):
        ParamVector(layout, [1.0])
    with pytest.raises(ShapeError):
        ParameterLayout([ParameterSpec("a", Transform.LOG, "phi")] * 2)
    params = ParamVector(layout, [2.0, 0.25])
    assert params["b"] == 0.25 and params.get("c") is None
    assert not ParamVector(layout, [2.0, 1.5]).in_support()
    assert ParamVector.from_unconstrained(layout, params.unconstrained()).as_dict() == pytest.approx(params.as_dict())


def test_prior_set_overrides():
    priors = PriorSet.from_dict({"priors": {"tau": {"family": "beta", "a": 2, "b": 2}}})
    assert priors.priors["tau"] == Beta(2.0, 2.0)
    assert priors.priors["phi"] == InverseGamma(5.0, 5.0)
    assert priors.to_dict()["priors"]["tau"]["family"] == "beta"


def test_missing_prior_key(small_data):
    model = prepared("ADE", small_data)
    priors = PriorSet()
    del priors.priors["log_kappa"]
    with pytest.raises(ConfigError):
        priors.check_layout(model.layout)


def test_log_density_off_support(small_data):
    model = prepared("SDE", small_data)
    theta = ParamVector(model.layout, [1.0, 1.2, 2.0, 1.0, 0.1])
    assert PriorSet().log_density(theta) == -np.inf


@pytest.mark.parametrize("name", ["SE", "ARD", "Edn", "SDE", "ADE"])
def test_init_draws_are_in_support_and_seeded(name, small_data):
    model = prepared(name, small_data)
    priors = PriorSet()
    draws = priors.draw_init(200, model.layout, seed=11)
    again = priors.draw_init(200, model.layout, seed=11)
    assert all(d.in_support() for d in draws)
    np.testing.assert_array_equal(draws[17].values, again[17].values)
    assert all(np.isfinite(priors.log_density(d)) for d in draws)


def test_ade_init_combines_rates(small_data):
    model = prepared("ADE", small_data)
    draws = PriorSet().draw_init(500, model.layout, seed=3)
    lam = np.array([d["lambda"] for d in draws])
    log_kappa = np.array([d["log_kappa"] for d in draws])
    lambda1, lambda2 = lam / np.exp(log_kappa), lam * np.exp(log_kappa)
    # both rates are half-Cauchy draws, so their medians sit near the unit scale
    assert 0.6 < np.median(lambda1) < 1.6
    assert 0.6 < np.median(lambda2) < 1.6


def test_draw_init_rejects_empty(small_data):
    with pytest.raises(ConfigError):
        PriorSet().draw_init(0, prepared("SE", small_data).layout, seed=0)


def test_tau_init_mean():
    draws = PriorSet().init["tau"].sample(np.random.default_rng(4), size=100_000)
    assert abs(draws.mean() - 0.4) < 3 * mcse(draws)


@pytest.mark.parametrize("prior, lower, upper", [
    (InverseGamma(5, 5), 0, np.inf), (Beta(1, 1), 0, 1), (Beta(2 / 3, 1), 0, 1), (Beta(2, 3), 0, 1),
    (HalfNormal(np.sqrt(10)), 0, np.inf), (Normal(0, 1), -np.inf, np.inf), (HalfCauchy(1.0), 0, np.inf),
])
def test_densities_integrate_to_one(prior, lower, upper):
    total, _ = quad(lambda x: np.exp(prior.log_density(x)), lower, upper, limit=200)
    assert total == pytest.approx(1.0, abs=1e-5)
