from .perturbation import (
    RECOMBINATIONS,
    FirstOrderChain,
    PerturbationProfile,
    PerturbedLayerSolution,
    PerturbedModel,
    bilinear_integral,
    bounded_amplitudes,
    equivalent_layer,
    exact_stationary_resistance,
    first_order_chain,
    first_order_exterior,
    layer_perturbation_integral,
    local_truncation_error,
    propagate_perturbation,
    simulate_perturbed,
    truncation_error_bound,
    zero_order_field,
)
from .propagator import (
    AdmittanceChain,
    HarmonicState,
    TransferChain,
    ZeroOrderModel,
    backward_chain,
    forward_chain,
    global_transfer,
    harmonic_state,
    layer_transfer_factor,
    outward_pass,
    propagate_layer,
    propagate_layer_stationary,
    state_A_surface,
    state_B_response,
    superpose,
    surface_quotient,
)
from .radiative import (
    KELVIN,
    STEFAN_BOLTZMANN,
    RadiativeConfig,
    linearized_h_rad,
    pseudo_admittance,
    radiative_residual,
    simulate_radiative,
)
from .reference import (
    FourierDiagnostic,
    OverflowReport,
    SlicedOracleModel,
    SlicedOracleResult,
    TmmMatrix,
    fourier_diagnostic,
    iterative_radiative_oracle,
    overflow_boundary,
    sliced_assembly,
    sliced_oracle_admittance,
    tmm_admittance,
    tmm_layer_matrix,
)
from .spectral import (
    HarmonicSynthesis,
    SimConfig,
    SimulationResult,
    SpectralSeries,
    angular_frequencies,
    detrend_linear,
    dominant_time_constant,
    forward_transform,
    inverse_transform,
    pad_history,
    simulate,
    sol_air,
)

__all__ = [
    "AdmittanceChain",
    "HarmonicState",
    "TransferChain",
    "ZeroOrderModel",
    "backward_chain",
    "forward_chain",
    "global_transfer",
    "harmonic_state",
    "layer_transfer_factor",
    "outward_pass",
    "propagate_layer",
    "propagate_layer_stationary",
    "state_A_surface",
    "state_B_response",
    "superpose",
    "surface_quotient",
    "HarmonicSynthesis",
    "SimConfig",
    "SimulationResult",
    "SpectralSeries",
    "angular_frequencies",
    "detrend_linear",
    "dominant_time_constant",
    "forward_transform",
    "inverse_transform",
    "pad_history",
    "simulate",
    "sol_air",
    "RECOMBINATIONS",
    "FirstOrderChain",
    "PerturbationProfile",
    "PerturbedLayerSolution",
    "PerturbedModel",
    "bilinear_integral",
    "bounded_amplitudes",
    "equivalent_layer",
    "exact_stationary_resistance",
    "first_order_chain",
    "first_order_exterior",
    "layer_perturbation_integral",
    "local_truncation_error",
    "propagate_perturbation",
    "simulate_perturbed",
    "truncation_error_bound",
    "zero_order_field",
    "KELVIN",
    "STEFAN_BOLTZMANN",
    "RadiativeConfig",
    "linearized_h_rad",
    "pseudo_admittance",
    "radiative_residual",
    "simulate_radiative",
    "FourierDiagnostic",
    "OverflowReport",
    "SlicedOracleModel",
    "SlicedOracleResult",
    "TmmMatrix",
    "fourier_diagnostic",
    "iterative_radiative_oracle",
    "overflow_boundary",
    "sliced_assembly",
    "sliced_oracle_admittance",
    "tmm_admittance",
    "tmm_layer_matrix",
]
