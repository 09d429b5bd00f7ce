"""jumplab: a numerical laboratory for pure-jump Dirichlet forms.

Builds finite symmetric jump models, spectrally evaluates the associated heat
semigroup, and verifies the L^p energy identity together with its supporting
formulas (Bregman comparability, p-form representation equivalence, kernel
small-time limits) to quantified tolerances.
"""

from .model import (
    Diagnostics,
    Model,
    ModelSpecError,
    alpha_stable_ring,
    as_state_function,
    complete_graph,
    connected_components,
    function_indicator,
    function_random_zero_mean,
    model_from_spec,
    model_to_spec,
    validate_model,
)
from .bregman import (
    ComparabilityScan,
    bregman_f,
    bregman_h,
    comparability_ratio,
    comparability_scan,
    signed_power,
)
from .semigroup import (
    EigensolverError,
    Generator,
    Spectral,
    apply_pt,
    assemble_generator,
    heat_kernel,
    spectral_decompose,
    vague_limit_residual,
)
from .forms import (
    PFormReport,
    approx_form,
    approx_pform_kernel,
    dirichlet_form,
    halfpower_inclusion_check,
    pform_generator,
    pform_jump,
    pform_limit,
    three_representation_report,
)
from .hardy_stein import (
    DecayCheck,
    QuadratureBudgetError,
    QuadratureConfig,
    Report,
    decay_check,
    finite_horizon_check,
    hardy_stein_verify,
    integrate_panels,
    lp_norm_p,
)
from .montecarlo import EmpiricalCheck, PathEnsemble, empirical_pt_check, simulate_paths

__version__ = "0.1.0"

__all__ = [
    "Model",
    "ModelSpecError",
    "Diagnostics",
    "complete_graph",
    "alpha_stable_ring",
    "model_from_spec",
    "model_to_spec",
    "validate_model",
    "connected_components",
    "as_state_function",
    "function_random_zero_mean",
    "function_indicator",
    "ComparabilityScan",
    "signed_power",
    "bregman_f",
    "bregman_h",
    "comparability_ratio",
    "comparability_scan",
    "Generator",
    "Spectral",
    "EigensolverError",
    "assemble_generator",
    "spectral_decompose",
    "apply_pt",
    "heat_kernel",
    "vague_limit_residual",
    "PFormReport",
    "dirichlet_form",
    "approx_form",
    "approx_pform_kernel",
    "pform_limit",
    "pform_generator",
    "pform_jump",
    "three_representation_report",
    "halfpower_inclusion_check",
    "QuadratureConfig",
    "QuadratureBudgetError",
    "DecayCheck",
    "Report",
    "lp_norm_p",
    "decay_check",
    "integrate_panels",
    "finite_horizon_check",
    "hardy_stein_verify",
    "PathEnsemble",
    "EmpiricalCheck",
    "simulate_paths",
    "empirical_pt_check",
    "__version__",
]
