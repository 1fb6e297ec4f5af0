"""Spherical designs and cubature formulas built from reflection group orbits."""

from .poly import MultiPoly, act, laplacian
from .groups import ReflectionGroup, build_group, corner_orbit, corner_vectors, molien_dims, orbit
from .invariants import closed_form_invariant, closed_form_labels, invariant_harm_basis
from .designs import (WeightedDesign, corner_design, fisher_bound, is_tight, max_strength,
                      nonexistence_obstruction, strength, strength_direct, strength_full,
                      strength_invariant)
from .classify import DesignFamily, certify_family, classify_corner_designs, table_families
from .xu import (RadialWeight, XuFormula, XuSolveError, solve_moment_system, verify_conditions,
                 verify_degree)
from .config import Config

__version__ = "0.1.0"
