"""Exact sofic approximations of the von Neumann rank on free-group algebras.

Group-algebra matrices over Q, number fields, finite fields or Q(t) are
evaluated on finite permutation actions of the free group; the normalized
ranks, their reductions modulo primes, twisted versions and spectral moments
are all computed exactly.
"""
from .caps import Caps, default_caps, override_caps
from .coeff import (QQ, FiniteField, FunctionField, NumberField, PrimeField, PrimeIdeal, enumerate_primes,
                    house, matrix_house, reduce_mod_prime)
from .freealg import GAMatrix, GroupAlgebraElement, ball, parse_element, parse_word
from .rank import (RankReport, SparseMatrix, assemble_operator, discrepancy_bound, normalized_rank,
                   normalized_rank_mod, rank_exact)
from .sofic import (FiniteFSet, cyclic_fset, defect_profile, preset_approximation, product_action,
                    regular_action_of_image, zd_fset)
from .spectra import MomentSequence, hankel_psd, moments_finite, moments_free, semicontinuity_check, specialize
from .twist import Representation, extend_rep, twist_matrix, validate_rep

__all__ = [
    "assemble_operator", "ball", "Caps", "cyclic_fset", "default_caps", "defect_profile", "discrepancy_bound",
    "enumerate_primes", "extend_rep", "FiniteField", "FiniteFSet", "FunctionField", "GAMatrix",
    "GroupAlgebraElement", "hankel_psd", "house", "matrix_house", "moments_finite", "moments_free",
    "MomentSequence", "normalized_rank", "normalized_rank_mod", "NumberField", "override_caps",
    "parse_element", "parse_word", "preset_approximation", "PrimeField", "PrimeIdeal", "product_action", "QQ",
    "rank_exact", "RankReport", "reduce_mod_prime", "regular_action_of_image", "Representation",
    "semicontinuity_check", "SparseMatrix", "specialize", "twist_matrix", "validate_rep", "zd_fset",
]

__version__ = "0.1.0"
