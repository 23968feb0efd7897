"""Colorability thresholds, moments and Monte Carlo sweeps for random r-uniform hypergraphs."""

__version__ = "0.1.0"
