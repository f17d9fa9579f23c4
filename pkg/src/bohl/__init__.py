"""Bohl transformation toolkit for one-dimensional Schrodinger equations.

Lattice (``-Delta + V``) and continuum (``-d^2/dx^2 + V``) versions: solution
bases and potentials rebuilt from the diagonal of a Green function,
Agmon-type decay bounds, oscillation classification and Darboux
factorizations, each exposed as a checkable residual.
"""
from .errors import (
    BohlError,
    ConjugateDependenceError,
    ConsistencyError,
    DependentSolutionsError,
    DiagonalDegenerateError,
    HypothesisError,
    InvalidInputError,
    PositivityError,
    SingularSystemError,
)
from .lattice import (
    AgmonReport,
    BohlBasisDiscrete,
    BoundCheck,
    DiagonalSequence,
    GreenMatrix,
    LatticePotential,
    LatticeSolution,
    LatticeWindow,
    SFactorSequence,
    agmon_bound_report,
    agmon_constant,
    agmon_distance,
    bohl_reconstruct,
    build_green_matrix,
    darboux_discrete_apply,
    darboux_discrete_q,
    diagonal_sequence,
    gtov_residual,
    positive_basis,
    positive_green_matrix,
    potential_from_diagonal,
    s_factor,
    solve_three_term,
    symmetry_map,
    wronskian_discrete,
    wronskian_sequence,
)
from .continuum import (
    BohlBasisContinuum,
    ComplexCombination,
    ContinuumPotential,
    DiagonalFunction,
    Grid,
    GridSolution,
    OscillationResult,
    RabResidual,
    SpecialAlpha,
    bohl_basis,
    bump,
    conjugate_seed,
    darboux_apply,
    darboux_factorization_residual,
    diagonal_for_potential,
    diagonal_function,
    green_derivative_jump,
    green_function,
    integrate_sle,
    nonvanishing_combination,
    oscillation_classify,
    positive_pair,
    rab_residual,
    special_alpha,
    special_diagonal,
    wronskian_grid,
)

__version__ = "0.1.0"
