"""Exact computation of L-infinity structures on small Z2-graded spaces.

The engine represents odd codifferentials on the reduced symmetric
coalgebra S(W), computes their brackets and cohomology, and builds
miniversal deformations order by order over a graded-commutative base.
"""

__version__ = "0.1.0"

from linf.gspace import EVEN, ODD, GradedSpace, Parity, build_space
from linf.symw import coproduct, enumerate_monomials, koszul_sign, monomial_product, unshuffles
from linf.cochain import (
    ArityWindow,
    Cochain,
    basis_cochain,
    bracket,
    check_codifferential,
    differential,
    jacobi_correspondence,
    tilde,
)
from linf.paramring import ParamPoly, ParamRing, RelationIdeal, augment, ideal_equal, poly_mul, reduce_mod
from linf.deform import (
    CohomologyData,
    Deformation,
    ParamCochain,
    cohomology,
    decompose_obstruction,
    extend_order,
    miniversal,
    param_bracket,
    universal_infinitesimal,
)
from linf.morph import (
    MorphismData,
    RingMorphism,
    extend_to_coalgebra_morphism,
    invert_morphism,
    pushout,
    transport,
)
