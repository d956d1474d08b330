import numpy as np
import pytest

from src.errors import DataError
from src.inference.diagnostics import (
    DiagnosticsReport, QuantityDiagnostics, batch_means_variance, diagnose, geweke, mcse, weight_summary,
)
from src.inference.samples import PosteriorSample
from src.models.factory import ModelFactory


def test_mcse_of_iid_normal():
    x = np.random.default_rng(0).normal(size=10_000)
    assert 0.01 / 1.5 < mcse(x) < 0.01 * 1.5


def test_mcse_of_autoregressive_chain():
    rng = np.random.default_rng(57)
    x = np.zeros(100_000)
    for i in range(1, x.size):
        x[i] = 0.4 * x[i - 1] + rng.normal()
    # asymptotic variance of AR(1) with unit innovations is 1 / (1 - 0.4)^2
    assert mcse(x) == pytest.approx(np.sqrt(1 / 0.36 / x.size), rel=0.25)


def test_batch_means_needs_two_batches():
    with pytest.raises(DataError):
        batch_means_variance(np.ones(3))


def test_geweke_passes_iid_chains():
    passed = sum(abs(geweke(np.random.default_rng(seed).normal(size=1000))) < 3 for seed in range(100))
    assert passed >= 95


def test_geweke_flags_trend():
    x = np.linspace(0, 5, 1000) + np.random.default_rng(1).normal(scale=0.1, size=1000)
    assert abs(geweke(x)) > 3


def test_geweke_constant_chain_is_undefined():
    assert np.isnan(geweke(np.ones(100)))
    with pytest.raises(DataError):
        geweke(np.ones(10))


def quantity(label, z_ok=True, mcse_ok=True):
    return QuantityDiagnostics(label, 0.0, 1.0, 0.01, 0.0, z_ok, mcse_ok)


def test_report_pass_rule():
    good = DiagnosticsReport([quantity("a"), quantity("b", z_ok=None, mcse_ok=None)], 0, 0, 0.8, 0.1)
    assert good.passed and good.undefined == ["b"]
    assert not DiagnosticsReport([quantity("a", z_ok=False)], 0, 0, 0.8, 0.1).passed
    assert not DiagnosticsReport([quantity("a", mcse_ok=False)], 0, 0, 0.8, 0.1).passed
    diverging = DiagnosticsReport([quantity("a")], 2, 0, 0.8, 0.1)
    assert not diverging.passed
    assert "2 divergent transition(s)" in diverging.failures()
    # tree depth hits are reported but do not fail the chain
    assert DiagnosticsReport([quantity("a")], 0, 5, 0.8, 0.1).passed


def test_report_serializes_nan_as_null():
    report = DiagnosticsReport([QuantityDiagnostics("a", 1.0, 0.0, 0.0, float("nan"), None, None)], 0, 0, 0.8, 0.1)
    record = report.to_dict()["quantities"][0]
    assert record["geweke_z"] is None


def test_report_keys():
    record = DiagnosticsReport([quantity("a")], 0, 0, 0.8, 0.1).to_dict()
    assert set(record) == {
        "passed", "divergences", "treedepth_hits", "mean_accept_stat", "step_size", "sampler",
        "geweke_threshold", "mcse_ratio", "failures", "undefined", "quantities",
    }


def test_diagnose_monitors_every_weight(small_data):
    model = ModelFactory.create("ARD").prepare(small_data)
    rng = np.random.default_rng(0)
    m = 400
    draws = np.exp(rng.normal(scale=0.1, size=(m, model.layout.size)))
    sample = PosteriorSample(model.layout, draws, np.zeros(m), np.full(m, 0.8), np.full(m, 3),
                             np.full(m, 7), np.zeros(m, dtype=bool), 0.1)
    report = diagnose(sample, model)
    assert [q.label for q in report.quantities] == model.monitored_labels()
    assert all(q.geweke_z is not None for q in report.quantities)
    summary = weight_summary(sample, model)
    assert summary["mean"].shape == (small_data.grid.K,)
    assert np.all(summary["q025"] <= summary["mean"]) and np.all(summary["mean"] <= summary["q975"])
