"""GLM-OS: logistic regression with optimally scaled predictors."""

__version__ = "0.1.0"
