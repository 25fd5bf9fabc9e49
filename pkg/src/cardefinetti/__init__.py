"""Symmetric states on finite CAR algebras and their product-state decomposition."""
from .car import CarContext, build_context, even_odd_split, gamma_iso, matrix_unit, normalized_trace, parity
from .definetti import (DeFinettiDecomposer, FactorType, MixingMeasure, MomentInverter,
                        classify_type, decompose_state, eigenvalue_ratio_spectrum,
                        reconstruct_state, recover_measure)
from .exceptions import (CapacityError, CarError, DegenerateInputError, DimensionError,
                         DomainError, IdentityCheckError, InfeasibleMomentsError,
                         NotSymmetricError)
from .gns import GnsRep, build_gns, represented_center
from .perms import (FockUnitary, Permutation, alpha, intersecting_fraction,
                    mixing_permutation, second_quantize, symmetrize_operator)
from .states import (State, evaluate, is_even, is_symmetric, mixture, occupation_moments,
                     product_state, restrict, symmetrize_state, tracial_state)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "CarContext",
    "CarError",
    "DeFinettiDecomposer",
    "DegenerateInputError",
    "DimensionError",
    "DomainError",
    "FactorType",
    "FockUnitary",
    "GnsRep",
    "IdentityCheckError",
    "InfeasibleMomentsError",
    "MixingMeasure",
    "MomentInverter",
    "NotSymmetricError",
    "Permutation",
    "State",
    "alpha",
    "build_context",
    "build_gns",
    "classify_type",
    "decompose_state",
    "eigenvalue_ratio_spectrum",
    "evaluate",
    "even_odd_split",
    "gamma_iso",
    "intersecting_fraction",
    "is_even",
    "is_symmetric",
    "mixture",
    "matrix_unit",
    "mixing_permutation",
    "normalized_trace",
    "occupation_moments",
    "parity",
    "product_state",
    "reconstruct_state",
    "represented_center",
    "recover_measure",
    "restrict",
    "second_quantize",
    "symmetrize_operator",
    "symmetrize_state",
    "tracial_state",
]
