"""Minima of lattices in R^r + C^s and explicit bounds for Euclidean minima of number fields."""
from .core import (
    DEFAULT_PRECISION,
    Lattice,
    Precision,
    Signature,
    Vector,
    lattice_from_basis,
    lattice_from_rows,
    norm_form,
    orthonormal_chart,
    scalar_product,
)
from .kernels import BACKEND
from .numberfield import FieldSpec, build_lattice, load_catalog
from .reduction import lll_reduce, successive_minima
from .minima import covering_radius, homogeneous_minimum, inhomogeneous_minimum
from .flow import TorusPoint, apply_flow, search_semi_wellrounded
from .bounds import best_bound, main_bound, reproduce_table

__version__ = "0.1.0"
