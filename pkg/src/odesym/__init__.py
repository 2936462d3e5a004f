"""Symmetry generators, Lagrangians and first integrals of ODEs of maximal symmetry."""

from .exprcore import (
    COEF_Q,
    JET,
    PARAMS,
    SOL_U,
    SOL_V,
    X,
    Inconclusive,
    UnsupportedForm,
    canon,
    jet,
    max_jet_order,
    numeric_witness,
    partial,
    zero_test,
)
from .grammar import ParseError, parse, render
from .jetcalc import (
    DiffEq,
    Lagrangian,
    NotExact,
    VectorField,
    apply_prolongation,
    characteristic,
    euler,
    frechet,
    frechet_adjoint,
    inverse_total_derivative,
    prolong,
    total_derivative,
)
from .maxsym import (
    BadOrder,
    EliminationFailed,
    GeneratorSet,
    OddOrder,
    SourceContext,
    build_lode,
    canonical_lagrangian,
    commutator,
    generators,
    natural_lagrangian,
    solution_basis,
    source_transformation,
    transformed_lagrangian,
)
from .noether import (
    FirstIntegral,
    NotADivergenceSymmetry,
    NotFirstIntegral,
    SymmetryVerdict,
    divergence_check,
    divergence_relation_check,
    first_integral,
    invariance_expression,
    lie_symmetry_check,
    variational_check,
    verify_first_integral,
)
from .transform import (
    MissingInverse,
    PointTransformation,
    SingularMap,
    compose,
    identity_map,
    jet_substitution,
    pushforward,
    transform_equation,
    transform_equation_covariant,
    transform_first_integral,
    transform_lagrangian,
)

__version__ = "0.1.0"
