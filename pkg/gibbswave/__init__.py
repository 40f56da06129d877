"""Galerkin-truncated radial defocusing wave equation: simulator and Gibbs-measure checks."""

from gibbswave.version import __version__

__all__ = ["__version__"]
