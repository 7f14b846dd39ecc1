"""Numerical laboratory for a family of indefinite form closures.

A fixed multiplication operator on a sign-weighted line admits a whole
family of closures of its quadratic form, indexed by a parameter in
[0, 2].  This package realizes the family at desk scale: weighted
quadrature with divergence classification, membership oracles for the
form domains, Ritz estimates of the eigenspectral projections' norms,
contour-integral spectral calculus on discretized models, and the
indefinite Sturm-Liouville example with its partial-sum study.
"""

from .eigenspectral import (
    CriticalPointVerdict,
    GridSpec,
    GrowthCurve,
    SpectralInterval,
    apply_E,
    classify_infinity,
    estimate_projection_norm,
    growth_curve,
    interval,
)
from .forms import (
    InnerProductKind,
    InnerProductValue,
    apply_J_alpha,
    apply_Q_alpha,
    apply_S_alpha,
    inner_product,
    project_pm,
    t_alpha_indef,
    t_alpha_pos,
)
from .langer_contour import (
    ContourSpec,
    DiscretizedModel,
    build_discretized_model,
    check_parseval_plus,
    check_representation,
    contour_spectral_projection,
    resolvent_apply,
    verify_spectral_calculus,
)
from .membership import (
    MembershipVerdict,
    Verdict,
    decide_dom_t_alpha,
    decide_membership,
    witness_table,
)
from .model_space import (
    DerivedWeight,
    ModelWeight,
    TestFunction,
    eval_weight,
    even_part,
    indicator,
    make_f_tau,
    make_g_tau,
    odd_part,
    truncate,
    zero_function,
)
from .quadrature import (
    IntegrationResult,
    QuadratureConfig,
    Status,
    estimate_tail_exponent,
    integrate_weighted,
    symmetric_principal_limit,
)
from .sturm_liouville import (
    EigenPair,
    SLProblem,
    assemble_operator,
    compute_eigenpairs,
    eval_p,
    eval_u0,
    expansion_coefficients,
    make_problem,
    partial_sum_study,
)

__version__ = "0.1.0"
