"""Exact image structure of linear derivations and E-derivations.

Everything is computed over Q(zeta_m) with exact arithmetic: per-degree
image bases of graded linear maps, membership with preimage witnesses or
residual certificates, closed-form monomial rules with constructive
preimages, subspace identity checks, and falsification-only MZ-subspace
scans.  The ``mzlab`` console script exposes all of it.
"""

from .errors import (
    ClosedFormUnavailable,
    DegreeCapError,
    FieldMismatchError,
    JordanizeError,
    LTConditionError,
    MapKindError,
    MemberRegionError,
    MzlabError,
    NilpotencyError,
    ParseError,
    SingularMatrixError,
    VariableCountError,
)
from .field import (
    CyclotomicScalar,
    FieldConfig,
    Rational,
    cyclotomic_poly,
    field,
    is_primitive_root,
    root_of_unity_order,
)
from .image import (
    DEFAULT_DEGREE_CAP,
    BCDecomposition,
    GradedImage,
    IdentityReport,
    MembershipVerdict,
    OmegaSweepReport,
    bc_decompose,
    constructive_preimage,
    image_basis,
    lt_triangular_preimage,
    member,
    monomial_member_closed_form,
    omega_member_sweep,
    quotient_member,
    verify_subspace_identity,
)
from .maps import (
    DERIVATION,
    EDERIVATION,
    ENDOMORPHISM,
    CanonicalCase,
    ConjugationMap,
    LinearMapSpec,
    apply_map,
    canonical,
    conjugate,
    derivation_apply,
    ederivation_apply,
    endomorphism_apply,
    exp_derivation,
    find_similarity,
    is_nilpotent,
    jordanize,
    lowering_derivation,
    one_minus_exp,
    spec_from_json_dict,
    triangular_ederivation,
    triangular_endo,
)
from .matrix import Matrix, RowReducer
from .mzscan import (
    MZScanConfig,
    MZScanReport,
    SuiteResult,
    default_family_samples,
    default_multipliers,
    mutation_sensitivity,
    mz_scan,
    perturbation_catches,
    power_escape_search,
    theorem_suite,
)
from .parse import ParsedExpr, parse_expression, parse_polynomial, parse_scalar
from .poly import (
    MAX_TOTAL_DEGREE,
    OMEGA,
    GradedComponent,
    MonomialOrder,
    Polynomial,
    component_dimension,
    monomial_basis,
    substitute_linear,
)

__version__ = "0.1.0"
