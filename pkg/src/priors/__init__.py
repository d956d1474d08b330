"""Priors, constraining transforms and initialization draws"""

from .distributions import (
    PRIOR_FAMILIES, Beta, Flat, HalfCauchy, HalfNormal, InverseGamma, Normal, Prior, prior_from_dict,
)
from .layout import ParameterLayout, ParameterSpec, ParamVector, Transform
from .prior_set import PriorSet, default_init, default_priors

__all__ = [
    'Prior', 'InverseGamma', 'Beta', 'HalfNormal', 'Normal', 'HalfCauchy', 'Flat',
    'PRIOR_FAMILIES', 'prior_from_dict',
    'Transform', 'ParameterSpec', 'ParameterLayout', 'ParamVector',
    'PriorSet', 'default_priors', 'default_init',
]
