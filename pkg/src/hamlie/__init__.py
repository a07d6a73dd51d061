"""Exact-arithmetic models of symplectic representations and the graded
modules over the Hamiltonian Lie algebra built from them."""

from .linalg import SparseMatrix, Subspace, nullspace, parse_scalar, format_scalar
from .symplectic import (
    SpAlgebra,
    bar,
    bracket,
    build_sp,
    pairing,
    positive_roots,
    rank_one,
    root_height,
    sp_decompose,
)
from .reps import (
    Representation,
    build_rep,
    contraction_theta,
    exterior_power,
    fundamental_rep,
    highest_weight_vectors,
    is_irreducible,
    natural_rep,
    rep_from_obj,
    symmetric_power,
    trivial_rep,
    verify_intertwiner,
)
from .hamiltonian import (
    GradedVector,
    ModuleParams,
    act_H,
    act_d,
    g1_polynomial,
    g2_polynomial,
    verify_g1,
    verify_g2_table,
    verify_ham_bracket,
    verify_named_actions,
    verify_shift_isomorphism,
)
from .submodules import (
    Box,
    GeneratorSet,
    TruncatedModule,
    build_submodule,
    claim1_inequality,
    claim2_witness,
    closure,
    invariance_check,
    irreducibility_probe,
)

__version__ = "0.1.0"
