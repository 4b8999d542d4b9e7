"""Exact crystal bases and global bases for quantum generalized Kac-Moody algebras."""

from .cartan import BorcherdsCartanDatum, builtin, load_datum, validate
from .crystal import CrystalGraph, graph_isomorphic, tensor_graphs
from .freealg import binf
from .globalbasis import global_basis
from .harness import run_suite
from .vrep import crystal, dims_table

__version__ = "0.1.0"

__all__ = [
    "BorcherdsCartanDatum",
    "CrystalGraph",
    "binf",
    "builtin",
    "crystal",
    "dims_table",
    "global_basis",
    "graph_isomorphic",
    "load_datum",
    "run_suite",
    "tensor_graphs",
    "validate",
]
