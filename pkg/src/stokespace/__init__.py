"""Two-mode quantum optics in Stokes space.

Truncated-Fock simulation of two-mode states behind a measurement beam
splitter, the essential moment-generating function of the Stokes vector
and its closed forms, a hierarchy of nonclassicality criteria, exact
multiplexed click-detector statistics with moment-based MGF sampling,
and FFT reconstruction of the essential phase-space density.
"""

from .config import (
    TOL,
    ConvergenceWarning,
    NumericalError,
    QuadratureError,
    Tolerances,
    TruncationWarning,
)
from .fock import (
    CoherentSpec,
    HomInputSpec,
    JointPhotonDistribution,
    MeasurementDirection,
    MixtureSpec,
    StateSpec,
    StokesVector,
    TmsvSpec,
    TwoModeState,
    VacuumSpec,
    auto_cutoff,
    beam_splitter,
    coherent_amplitudes,
    coherent_stokes,
    direction_from_tr,
    direction_to_beamsplitter,
    distribution_factorial_moment,
    factorial_moment,
    joint_photon_distribution,
    make_state,
    power_expectation,
    power_sum,
    spec_from_json,
    spec_to_json,
    stokes_mean,
)
from .mgf import (
    MgfQuery,
    QuadratureConfig,
    SurfaceSample,
    char_fn,
    find_node,
    husimi_q,
    mgf,
    mgf_closed_form,
    mgf_from_distribution,
    mgf_via_husimi_quadrature,
    sphere_grid,
    surface_map,
)
from .nonclassicality import (
    INCONCLUSIVE,
    NONCLASSICAL,
    CriterionReport,
    CrossCorrelationReport,
    MgfMatrixSpec,
    VarianceReport,
    cauchy_schwarz_violation,
    char_fn_criterion,
    cross_correlation_det,
    matrix_verdict,
    mgf_matrix,
    second_order_det,
    variance_criteria,
)
from .detector import (
    AccessibleRegion,
    ClickDetectorConfig,
    ClickDistribution,
    ClickSampleSet,
    accessible_region,
    click_distribution,
    click_moment_to_mgf_point,
    clicks_to_json,
    estimate_mgf_from_samples,
    moments_from_clicks,
    sample_clicks,
    samples_to_json,
)
from .reconstruct import (
    ClassicalityReport,
    CoherentEnsemble,
    Grid3,
    PessGrid,
    classicality_check,
    default_tau,
    dual_grid,
    ensemble_from_json,
    gaussian_ensemble,
    gaussian_pess_exact,
    invert_to_pess,
    l1_distance,
    load_pess,
    mgf_imaginary_grid,
    pess_mc_oracle,
    save_pess,
    stokes_points,
)

__version__ = "0.1.0"

__all__ = [
    "TOL",
    "Tolerances",
    "TruncationWarning",
    "ConvergenceWarning",
    "NumericalError",
    "QuadratureError",
    "VacuumSpec",
    "CoherentSpec",
    "HomInputSpec",
    "TmsvSpec",
    "MixtureSpec",
    "StateSpec",
    "spec_to_json",
    "spec_from_json",
    "MeasurementDirection",
    "direction_to_beamsplitter",
    "direction_from_tr",
    "TwoModeState",
    "make_state",
    "auto_cutoff",
    "beam_splitter",
    "coherent_amplitudes",
    "JointPhotonDistribution",
    "joint_photon_distribution",
    "power_sum",
    "power_expectation",
    "factorial_moment",
    "distribution_factorial_moment",
    "StokesVector",
    "coherent_stokes",
    "stokes_mean",
    "MgfQuery",
    "mgf",
    "mgf_from_distribution",
    "mgf_closed_form",
    "char_fn",
    "SurfaceSample",
    "sphere_grid",
    "surface_map",
    "husimi_q",
    "QuadratureConfig",
    "mgf_via_husimi_quadrature",
    "find_node",
    "NONCLASSICAL",
    "INCONCLUSIVE",
    "MgfMatrixSpec",
    "CriterionReport",
    "mgf_matrix",
    "matrix_verdict",
    "second_order_det",
    "cauchy_schwarz_violation",
    "char_fn_criterion",
    "VarianceReport",
    "variance_criteria",
    "CrossCorrelationReport",
    "cross_correlation_det",
    "ClickDetectorConfig",
    "ClickDistribution",
    "ClickSampleSet",
    "click_distribution",
    "moments_from_clicks",
    "click_moment_to_mgf_point",
    "AccessibleRegion",
    "accessible_region",
    "sample_clicks",
    "estimate_mgf_from_samples",
    "clicks_to_json",
    "samples_to_json",
    "Grid3",
    "dual_grid",
    "PessGrid",
    "CoherentEnsemble",
    "ensemble_from_json",
    "stokes_points",
    "gaussian_ensemble",
    "gaussian_pess_exact",
    "default_tau",
    "mgf_imaginary_grid",
    "invert_to_pess",
    "pess_mc_oracle",
    "ClassicalityReport",
    "classicality_check",
    "l1_distance",
    "save_pess",
    "load_pess",
]
