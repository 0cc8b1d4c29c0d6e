"""Orthomartingale decompositions and limit-theorem diagnostics for
stationary random fields on the d-dimensional integer lattice.

The package splits first-chaos linear fields into a fully projected
core, boundary transfer terms, and a corner remainder; samples the
corresponding lattice fields reproducibly; and verifies the resulting
invariance-principle, moment, tail, and modulus claims numerically.
"""

__version__ = "0.1.0"

from . import kernels
from .chaos import (
    ChaosElement,
    InnovationLaw,
    LpNormEstimate,
    SigmaAlgebraSpec,
    combine,
    l2_norm,
    lp_norm_estimate,
    project,
    shift,
)
from .decomposition import (
    Decomposition,
    OmdReport,
    SeriesReport,
    decompose,
    decompose_generic,
    limit_variance,
    linear_condition,
    omd_verify,
    reconstruct,
    series_condition,
    symbolic_partial_sum,
    axis_split,
)
from .fields import (
    EmpiricalSample,
    ExperimentSpec,
    FieldSpec,
    GridSample,
    PathSample,
    StatisticSpec,
    as_path_sample,
    partial_sum,
    run_experiment,
    sample_innovations,
    sample_linear_field,
    sample_product_omd,
)
from .lattice import HalfSpaceRegion, Rect
from .vcentropy import (
    CoveringReport,
    SetClass,
    VcReport,
    covering_exponent,
    covering_number,
    entropy_integral,
    picked_count,
    rho,
    vc_index,
)
from .verification import (
    CovarianceReport,
    HolderReport,
    KSReport,
    MomentRatioReport,
    TailBoundReport,
    YoungFunctionSpec,
    beta_exponent,
    covariance_structure_test,
    gaussian_limit_test,
    holder_check,
    holder_threshold,
    ks_statistic,
    luxemburg_norm,
    moment_ratio,
    rademacher_sum_pnorm,
    tail_bound_check,
    young_eval,
)

__all__ = [
    "__version__",
    "kernels",
    # chaos algebra
    "ChaosElement",
    "InnovationLaw",
    "SigmaAlgebraSpec",
    "LpNormEstimate",
    "shift",
    "project",
    "combine",
    "l2_norm",
    "lp_norm_estimate",
    # decomposition
    "Decomposition",
    "OmdReport",
    "SeriesReport",
    "axis_split",
    "decompose",
    "decompose_generic",
    "reconstruct",
    "omd_verify",
    "series_condition",
    "linear_condition",
    "symbolic_partial_sum",
    "limit_variance",
    # lattice geometry
    "Rect",
    "HalfSpaceRegion",
    # fields and experiments
    "GridSample",
    "FieldSpec",
    "StatisticSpec",
    "ExperimentSpec",
    "EmpiricalSample",
    "PathSample",
    "as_path_sample",
    "partial_sum",
    "run_experiment",
    "sample_innovations",
    "sample_linear_field",
    "sample_product_omd",
    # verification
    "YoungFunctionSpec",
    "young_eval",
    "beta_exponent",
    "luxemburg_norm",
    "rademacher_sum_pnorm",
    "MomentRatioReport",
    "moment_ratio",
    "KSReport",
    "ks_statistic",
    "gaussian_limit_test",
    "CovarianceReport",
    "covariance_structure_test",
    "TailBoundReport",
    "tail_bound_check",
    "HolderReport",
    "holder_threshold",
    "holder_check",
    # complexity / entropy
    "SetClass",
    "VcReport",
    "CoveringReport",
    "picked_count",
    "vc_index",
    "rho",
    "covering_number",
    "covering_exponent",
    "entropy_integral",
]
