"""Exact symbolic analysis of singular Lagrangian systems."""
__version__ = "0.1.0"
