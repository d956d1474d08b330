"""Spline smoothing and functional principal components"""

from .basis import BasisSystem, fit_basis
from .model import FpcaModel, fit_fpca, transform

__all__ = ['BasisSystem', 'fit_basis', 'FpcaModel', 'fit_fpca', 'transform']
