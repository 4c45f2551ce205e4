"""Adversarial training of linear classifiers on Gaussian data."""

__version__ = "1.0.0"
