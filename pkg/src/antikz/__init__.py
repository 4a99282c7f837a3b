"""Noise-averaged Landau-Zener and transverse-field Ising dynamics under white noise."""

__version__ = "0.1.0"
