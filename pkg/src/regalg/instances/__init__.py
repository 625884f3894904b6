"""Concrete ordered algebras with exact solvers and independent oracles."""
from .finite import FiniteAlgebra, chain, diamond, lattice_semiring, two_point
from .languages import cfg_slice_oracle, lang_slice, letter_env
from .natinf import Verdict, divergence_certificate_linear, natinf
from .regular import RegularLang, arden_solve_linear, regular_algebra, regular_slice
from .tropical import (
    WeightedDigraph, bellman_ford_oracle, graph_to_linear_system, parse_graph, tropical,
)

__all__ = [
    "FiniteAlgebra", "chain", "diamond", "lattice_semiring", "two_point",
    "cfg_slice_oracle", "lang_slice", "letter_env",
    "Verdict", "divergence_certificate_linear", "natinf",
    "RegularLang", "arden_solve_linear", "regular_algebra", "regular_slice",
    "WeightedDigraph", "bellman_ford_oracle", "graph_to_linear_system", "parse_graph", "tropical",
]
