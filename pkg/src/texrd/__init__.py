"""Spatio-temporal texture features and RD-curve prediction for raw video."""

__version__ = "0.1.0"
