"""Riemann-invariant laboratory for isentropic Euler flow."""
__version__ = "0.1.0"
