"""Exact canonical equivariant cohomology classes on GKM graphs.

Submodules: ``exactalg`` (polynomials and rational functions over Q),
``gkmgraph`` (graphs, validation, I/O), ``morse`` (directions and indices),
``canonical`` (Theta, restrictions, duals, structure constants),
``oracle`` (independent solvers) and ``spaces`` (built-in examples).
"""
from __future__ import annotations

__version__ = "0.1.0"

from .canonical import canonical_table, dual_tables, structure_constants, theta_table
from .exactalg import Polynomial, RationalFunction
from .gkmgraph import GkmGraph, load_graph, validate
from .morse import morse_data
from .spaces import make_space

__all__ = [
    "GkmGraph",
    "Polynomial",
    "RationalFunction",
    "canonical_table",
    "dual_tables",
    "load_graph",
    "make_space",
    "morse_data",
    "structure_constants",
    "theta_table",
    "validate",
]
