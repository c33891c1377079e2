"""Exact and numeric tools for Hamiltonian systems with exceptional planar potentials.

``V_{k,l} = alpha (q2 - i q1)^l (q2 + i q1)^(k-l)``: catalog of first
integrals, direct-method search, Darboux points, invariant planes and
variational equations.
"""

from .backend import NAME as BACKEND
from .exactnum import I, GaussianRational
from .mech import (
    HamiltonianSystem,
    catalog,
    exceptional_potential,
    exceptional_system,
    is_first_integral,
    poisson_bracket,
)
from .parser import ParseError, parse, render
from .poly import BIHOM, NATURAL, Poly

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BIHOM",
    "NATURAL",
    "GaussianRational",
    "HamiltonianSystem",
    "I",
    "ParseError",
    "Poly",
    "catalog",
    "exceptional_potential",
    "exceptional_system",
    "is_first_integral",
    "parse",
    "poisson_bracket",
    "render",
]
