"""Gaussian split-step propagation of quantum pulses in chi(3) and chi(2) waveguides."""

__version__ = "0.1.0"
