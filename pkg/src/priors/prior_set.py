"""Independent priors and initialization draws for a parameter layout"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Union

import numpy as np

from src.errors import ConfigError
from src.priors.distributions import (
    Beta, HalfCauchy, HalfNormal, InverseGamma, Normal, Prior, prior_from_dict,
)
from src.priors.layout import ParameterLayout, ParamVector

logger = logging.getLogger(__name__)


def default_priors() -> Dict[str, Prior]:
    return {
        "phi": InverseGamma(5.0, 5.0),
        "length_scale": InverseGamma(5.0, 5.0),
        "tau": Beta(1.0, 1.0),
        "lambda": HalfNormal(np.sqrt(10.0)),
        "log_kappa": Normal(0.0, 1.0),
        "sigma_f": HalfNormal(1.0),
        "sigma_eps": HalfNormal(1.0),
    }


def default_init() -> Dict[str, Prior]:
    """Random-search distributions; "rate" draws lambda1 and lambda2"""
    return {
        "phi": HalfNormal(1.0),
        "length_scale": HalfNormal(1.0),
        "sigma_f": HalfNormal(5.0),
        "sigma_eps": HalfNormal(0.5),
        "rate": HalfCauchy(1.0),
        "tau": Beta(2.0 / 3.0, 1.0),
    }


@dataclass
class PriorSet:
    """Prior per prior key; every layout parameter points at one key"""
    priors: Dict[str, Prior] = field(default_factory=default_priors)
    init: Dict[str, Prior] = field(default_factory=default_init)

    @classmethod
    def from_dict(cls, data: Optional[Dict]) -> "PriorSet":
        """Override defaults with {"priors": {key: {...}}, "init": {key: {...}}}"""
        prior_set = cls()
        data = data or {}
        for section in ("priors", "init"):
            overrides = data.get(section) or {}
            target = getattr(prior_set, section)
            for key, spec in overrides.items():
                target[key] = prior_from_dict(spec)
        return prior_set

    def to_dict(self) -> Dict:
        return {
            "priors": {k: v.to_dict() for k, v in self.priors.items()},
            "init": {k: v.to_dict() for k, v in self.init.items()},
        }

    def check_layout(self, layout: ParameterLayout) -> None:
        missing = sorted({s.prior_key for s in layout.specs if s.prior_key not in self.priors})
        if missing:
            raise ConfigError(f"No prior configured for: {', '.join(missing)}")

    def log_density(self, theta: ParamVector) -> float:
        """Sum of independent log densities; -inf off the support"""
        if not theta.in_support():
            return -np.inf
        total = 0.0
        for spec, value in zip(theta.layout.specs, theta.values):
            total += self.priors[spec.prior_key].log_density(value)
        return float(total) if np.isfinite(total) else -np.inf

    def grad_log_density(self, theta: ParamVector) -> np.ndarray:
        """Gradient in constrained coordinates"""
        return np.array([
            self.priors[spec.prior_key].grad_log_density(value)
            for spec, value in zip(theta.layout.specs, theta.values)
        ], dtype=float)

    def draw_init(self, n: int, layout: ParameterLayout,
                  seed: Union[int, np.random.Generator]) -> List[ParamVector]:
        """
        Draw n starting points for random search

        Rates are drawn as (lambda1, lambda2); layouts with log_kappa get
        lambda = sqrt(lambda1 lambda2) and log_kappa = log(lambda2 / lambda1) / 2,
        layouts with a single rate use lambda1.

        Args:
            n: number of draws
            layout: parameter layout of the model
            seed: integer seed or generator

        Returns:
            List of n in-support ParamVector draws
        """
        if n < 1:
            raise ConfigError(f"draw_init needs n >= 1, got {n}")
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        columns = {}
        rates = None
        for spec in layout.specs:
            if spec.prior_key in ("lambda", "log_kappa"):
                if rates is None:
                    rates = self.init["rate"].sample(rng, size=(n, 2))
                    # a zero rate would leave the support
                    rates = np.maximum(rates, np.finfo(float).tiny)
                if spec.prior_key == "lambda":
                    has_kappa = any(s.prior_key == "log_kappa" for s in layout.specs)
                    columns[spec.name] = np.sqrt(rates[:, 0] * rates[:, 1]) if has_kappa else rates[:, 0]
                else:
                    columns[spec.name] = 0.5 * np.log(rates[:, 1] / rates[:, 0])
                continue
            if spec.prior_key not in self.init:
                raise ConfigError(f"No initialization distribution for '{spec.prior_key}'")
            draws = self.init[spec.prior_key].sample(rng, size=n)
            if spec.transform.value == "log":
                draws = np.maximum(draws, np.finfo(float).tiny)
            elif spec.transform.value == "logit":
                draws = np.clip(draws, 1e-12, 1.0 - 1e-12)
            columns[spec.name] = draws
        matrix = np.column_stack([columns[name] for name in layout.names])
        return [ParamVector(layout, row) for row in matrix]
