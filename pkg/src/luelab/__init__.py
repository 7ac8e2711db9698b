"""luelab: numerics for linear spectral statistics of the Laguerre Unitary Ensemble."""

__version__ = "0.1.0"
