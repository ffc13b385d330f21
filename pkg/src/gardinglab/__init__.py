"""Shifted Garding cones, m-positivity, and curvature-operator classification.

The package tests vectors and operator spectra against three nested cone
families (Garding cones, their shifted variants, and m-positivity cones),
verifies the inclusion of shifted cones into positivity cones by sampling
and boundary optimization, builds curvature operators of model spaces with
a self-contained eigensolver, and classifies spectra into topological
verdict labels gated by per-dimension shift thresholds.
"""

from .classify import (
    ClassificationReport,
    ThresholdTable,
    classify_first_kind,
    classify_kaehler,
    classify_second_kind,
    thresholds,
)
from .cones import (
    ConeMembership,
    ShiftParams,
    in_garding_cone,
    in_positivity_cone,
    in_shifted_cone,
    nesting_check,
    shift,
)
from .config import DEFAULT_TOL, RunConfig, load_config
from .curvature import (
    CurvatureTensor,
    OperatorMatrix,
    Spectrum,
    assemble_first_kind,
    assemble_second_kind,
    eigen_spectrum,
    jacobi_eigensystem,
    model_product_spheres,
    model_space_form,
    scalar_curvature_checks,
)
from .inclusion import (
    DichotomyVerdict,
    EpsilonParams,
    boundary_search,
    dichotomy_check,
    epsilon_for_target_m,
    epsilon_to_params,
    sharp_witness,
    shift_identity_residual,
    verify_inclusion_sampling,
)
from .symfun import (
    RealVector,
    SortedVector,
    elementary_symmetric,
    normalized_partial_sum,
    partial_sum_fractional,
    sigma2_via_power_sums,
)
from .weighted import (
    FormDegreeCoeffs,
    WeightBudget,
    anchored_lower_bound,
    budget_normalized_bound,
    bulk_positivity,
    form_degree_coeff,
    form_degree_positivity,
    refined_one_form_coeff,
    weighted_inf,
    weighted_sup,
)

__version__ = "0.1.0"
