"""Epidemic trend forecasting with Bayesian ridge and Gaussian process regressors."""

__version__ = "0.1.0"
