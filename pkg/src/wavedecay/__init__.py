"""Numerical laboratory for dispersive decay of the wave equation with a
decaying potential, reduced to the radial sector."""

__version__ = "0.1.0"
