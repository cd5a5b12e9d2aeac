"""Exact and approximate conditioning algorithms for discrete Bayesian networks."""
__version__ = "0.1.0"
