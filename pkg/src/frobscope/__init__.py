"""Frobenius angle statistics and effective equidistribution on compact groups."""

__version__ = "0.1.0"
