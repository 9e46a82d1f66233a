"""Pseudospectral simulation and verification toolkit for the (fractional)
BBM equation in analytic Gevrey spaces."""

__version__ = "0.1.0"
