"""Exact rational toolkit for finite structure relations between monic orthogonal polynomial sequences.

Given P orthogonal for u and a relation

    P_n + sum_{i=1}^N r_{i,n} P_{n-i} = Q_n + sum_{i=1}^M s_{i,n} Q_{n-i},

the package decides whether Q is orthogonal, and if so recovers polynomials
Phi, Psi of degrees M and N with Phi u = Psi v, all in exact arithmetic.
"""
from .errors import OpstructError
from .exact import Matrix, Poly, det, fmt_rational, parse_rational, rat
from .functionals import MomentFunctional, apply, hankel_regular, normalized, poly_mod
from .inverse import (
    FunctionalRelation,
    build_functional_relation,
    check_constancy,
    check_initial_conditions,
    check_nonvanishing,
    solve_lambda,
    solve_m_zero,
    solve_mu,
    uniqueness_dimension,
    verify_functional_identity,
)
from .io import PipelineConfig, parse_instance
from .mops import (
    Mops,
    RecurrenceCoeffs,
    build_mops,
    classical_family,
    family_moments,
    favard_oracle,
    moments_from_recurrence,
    recurrence_from_moments,
)
from .ortho import (
    check_Q_orthogonal,
    check_R_orthogonal,
    condition_values_A,
    condition_values_B,
    star_coeffs,
    theorem_main_check,
    tilde_coeffs,
)
from .pipeline import run_pipeline
from .relation import (
    RelationInstance,
    StructureRelation,
    build_R,
    check_lemma_dets,
    dual_matrix_A,
    fit_relation,
    make_instance,
    matrix_A,
    matrix_B,
    matrix_B_i,
    matrix_Btilde,
    matrix_Btilde_i,
    solve_Q,
)
from .report import CheckReport

__all__ = [name for name in dir() if not name.startswith("_")]
