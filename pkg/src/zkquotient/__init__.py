"""Exact cohomology of quotients Z_K/H of moment-angle complexes by freely acting subtori."""
from .complexes import SimplicialComplex, boundary_simplex, polygon, rp2
from .errors import ContractError, InputError, NotFreeError, RefusalError
from .exact_algebra import QQ, ZZ, CoefficientRing, HomologyGroup, IntMatrix
from .koszul import cohomology, ring_structure
from .oracle import compare, hochster_betti
from .torus import SubtorusSpec, acts_freely, diagonal_circle, quotient_model

__all__ = [
    "SimplicialComplex", "boundary_simplex", "polygon", "rp2",
    "ContractError", "InputError", "NotFreeError", "RefusalError",
    "QQ", "ZZ", "CoefficientRing", "HomologyGroup", "IntMatrix",
    "cohomology", "ring_structure", "compare", "hochster_betti",
    "SubtorusSpec", "acts_freely", "diagonal_circle", "quotient_model",
]
