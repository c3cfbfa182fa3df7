"""Laguerre beta-corners processes, their zero-temperature Gaussian limit,
and the Bessel hard-edge limit."""

__version__ = "0.1.0"

from . import ensembles, hard_edge, specfun, zero_temp

__all__ = ["ensembles", "hard_edge", "specfun", "zero_temp", "__version__"]
