"""Photon generation from vacuum by bang-bang control of the counter-rotating coupling."""

__version__ = "0.1.0"
