"""
Exact computations on noncommutative Hilbert schemes of points: points as
matrix tuples with a cyclic vector, canonical forms of GL_n-orbits, left
ideals and normal forms, cells and finite-field censuses, tangent spaces.
"""
from nchilbert.core_linear import ScalarField
from nchilbert.exceptions import HilbertError
from nchilbert.freealg import AlgebraPresentation, NCPoly, commutative_polynomial_ring
from nchilbert.orbits import CanonicalForm, IdealData, canonicalize
from nchilbert.points import GroupElement, PointData

__all__ = [
    "AlgebraPresentation",
    "CanonicalForm",
    "GroupElement",
    "HilbertError",
    "IdealData",
    "NCPoly",
    "PointData",
    "ScalarField",
    "canonicalize",
    "commutative_polynomial_ring",
]
