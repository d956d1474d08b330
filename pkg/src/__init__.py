"""fiGP-ADRD - Functional-input Gaussian process regression with automatic dynamic relevance determination"""

__version__ = "0.3.0"
