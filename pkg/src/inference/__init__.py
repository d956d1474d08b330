"""Parameter estimation: random search, MAP, MCMC and diagnostics"""

from .diagnostics import DiagnosticsReport, QuantityDiagnostics, diagnose, geweke, mcse, weight_summary
from .metropolis import run_rwm
from .nuts import DualAveraging, NutsSampler, run_nuts
from .pipeline import FitResult, McmcConfig, fit_model, sample
from .samples import ChainOutput, PosteriorSample
from .search import Candidate, OptimizationResult, multistart_optimize, random_search

__all__ = [
    'McmcConfig', 'FitResult', 'fit_model', 'sample',
    'Candidate', 'OptimizationResult', 'random_search', 'multistart_optimize',
    'NutsSampler', 'DualAveraging', 'run_nuts', 'run_rwm',
    'ChainOutput', 'PosteriorSample',
    'DiagnosticsReport', 'QuantityDiagnostics', 'diagnose', 'geweke', 'mcse', 'weight_summary',
]
