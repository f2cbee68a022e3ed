"""Area lower bounds for centered dual two-cells in the hyperbolic plane."""

from .errors import (
    CostGuard,
    DomainError,
    InvalidArity,
    InvalidCode,
    MissingCatalog,
    ParseError,
)
from .hypgeom import HalfSinhLength, a_m, semicyclic_area, semicyclic_radius, triangle_area
from .search import BoundQuery, BoundResult, flat_bound, minimize, reduced_assignments, treecrawler
from .trees import RootedTree, automorphism_orbits, canonicalize, decode, enumerate_trees

__version__ = "0.1.0"
