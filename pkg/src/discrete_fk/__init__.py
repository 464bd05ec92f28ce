"""Discrete Faber-Krahn toolkit: Dirichlet eigenvalues of lattice subgraphs of Z^2."""

from .errors import CapExceededError, ConvergenceError, ShapeError
from .grid import Cell, D4Element, Slice, Subgraph
from .spectral import SpectralReport, dense_spectrum, lambda_d

__version__ = "0.1.0"

__all__ = [
    "Cell",
    "Subgraph",
    "Slice",
    "D4Element",
    "SpectralReport",
    "lambda_d",
    "dense_spectrum",
    "ShapeError",
    "ConvergenceError",
    "CapExceededError",
]
