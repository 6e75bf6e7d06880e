"""Exact engine for line-bundle resolutions of toric pushforwards."""

__version__ = "0.1.0"
