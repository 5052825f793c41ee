import math

import numpy as np
import pytest
from scipy import integrate

from src.core import DegenerateError, GradientSpec, InputValidationError, Layer, WallAssembly, wave_vector
from src.extractors import synthetic_weather
from src.solvers import (
    PerturbationProfile,
    PerturbedModel,
    SimConfig,
    SlicedOracleModel,
    bilinear_integral,
    bounded_amplitudes,
    equivalent_layer,
    exact_stationary_resistance,
    first_order_chain,
    first_order_exterior,
    forward_chain,
    harmonic_state,
    layer_perturbation_integral,
    local_truncation_error,
    propagate_perturbation,
    simulate,
    simulate_perturbed,
    sliced_oracle_admittance,
    truncation_error_bound,
    zero_order_field,
)

DIURNAL = 2.0 * np.pi / 86400.0
AMPLITUDES = (0.7 - 0.2j, 0.3 + 0.4j)


def _first_order_exterior(wall: WallAssembly, omega):
    profiles = [PerturbationProfile.about_interior(l) if l.has_gradient else None for l in wall.layers]
    return first_order_chain(wall.base().layers, profiles, wall.h_int, wall.h_ext, omega).exterior


def _relative_error(wall: WallAssembly, slices: int = 4000) -> float:
    w = np.array([DIURNAL])
    reference = sliced_oracle_admittance(wall, w, slices).chain.exterior
    return float(abs(_first_order_exterior(wall, w) - reference)[0] / abs(reference)[0])


def _graded(beta_e: float, d1: float, thickness: float = 0.2) -> Layer:
    return Layer(
        thickness_m=thickness,
        conductivity=0.12,
        density=500.0,
        specific_heat=980.0,
        gradient=GradientSpec(
            conductivity_exterior=0.12 * math.exp(beta_e),
            vol_heat_capacity_interior=0.49e6,
            vol_heat_capacity_exterior=0.49e6 + d1 * thickness,
        ),
    )


def _quadrature(layer: Layer, omega: float, amplitudes):
    base = layer.base()
    q = complex(wave_vector(omega, base))
    profile = PerturbationProfile.about_interior(layer)
    e = layer.thickness_m

    def integrand(z):
        t, dt = zero_order_field(amplitudes, q, e, z)
        return complex(
            profile.conductivity_deviation(z) * dt**2 + 1j * omega * profile.capacity_deviation(z) * t**2
        )

    options = dict(epsabs=0.0, epsrel=1e-13, limit=500)
    re, _ = integrate.quad(lambda z: integrand(z).real, 0.0, e, **options)
    im, _ = integrate.quad(lambda z: integrand(z).imag, 0.0, e, **options)
    scale, _ = integrate.quad(lambda z: abs(integrand(z)), 0.0, e, **options)
    return complex(re, im), scale


def test__exact_stationary_resistance(aac_layer):
    assert exact_stationary_resistance(aac_layer) == pytest.approx(1.305077, rel=1e-6)
    expected, _ = integrate.quad(
        lambda z: 1.0 / (0.12 * math.exp(aac_layer.beta * z)), 0.0, 0.2, epsabs=0.0, epsrel=1e-13
    )
    assert exact_stationary_resistance(aac_layer) == pytest.approx(expected, rel=1e-10)
    assert exact_stationary_resistance(aac_layer) < aac_layer.resistance


def test__exact_stationary_resistance_without_gradient(aac_layer):
    assert exact_stationary_resistance(aac_layer.base()) == pytest.approx(0.2 / 0.12)


def test__equivalent_layer(aac_layer):
    layer = equivalent_layer(aac_layer)
    assert layer.resistance == pytest.approx(1.305077, rel=1e-6)
    assert layer.vol_heat_capacity == pytest.approx(0.76e6)
    assert not layer.has_gradient


def test__bounded_amplitudes_reconstruct_endpoints():
    q = 12.0 * (1.0 + 1.0j)
    t0, te = 0.3 + 0.1j, -0.2 + 0.05j
    amplitudes = bounded_amplitudes(t0, te, q, 0.2)
    assert zero_order_field(amplitudes, q, 0.2, 0.0)[0] == pytest.approx(t0, abs=1e-12)
    assert zero_order_field(amplitudes, q, 0.2, 0.2)[0] == pytest.approx(te, abs=1e-12)


def test__bounded_amplitudes_zero_field():
    a, b = bounded_amplitudes(0.0, 0.0, 3.0 + 3.0j, 0.1)
    assert a == 0 and b == 0


def test__bounded_amplitudes_decouple_thick_layer():
    a, b = bounded_amplitudes(2.0, 5.0, 400.0 * (1.0 + 1.0j), 1.0)
    assert a == pytest.approx(5.0, rel=1e-15)
    assert b == pytest.approx(2.0, rel=1e-15)


def test__bounded_amplitudes_degenerate_stratum():
    with pytest.raises(DegenerateError):
        bounded_amplitudes(1.0, 1.0, 1.0 + 1.0j, 1e-16)


def test__midpoint_field_matches_sliced_chain(aac_wall):
    wall = aac_wall.base()
    oracle = sliced_oracle_admittance(wall, DIURNAL, 10, slice_homogeneous=True)
    t = oracle.interface_temperatures
    layer = wall.layers[0]
    q = wave_vector(DIURNAL, layer)
    amplitudes = bounded_amplitudes(t[0], t[10], q, layer.thickness_m)
    midpoint, _ = zero_order_field(amplitudes, q, layer.thickness_m, layer.thickness_m / 2)
    assert midpoint == pytest.approx(t[5], rel=1e-8)


def test__null_profile_has_no_integral(aac_layer):
    flat = GradientSpec(0.12, 0.49e6, 0.49e6)
    result = layer_perturbation_integral(*AMPLITUDES, aac_layer, flat, DIURNAL)
    assert result == 0


def test__capacity_only_profile():
    layer = _graded(0.0, 2.7e6)
    q = complex(wave_vector(DIURNAL, layer.base()))
    e = layer.thickness_m

    def integrand(z):
        return 1j * DIURNAL * 2.7e6 * z * zero_order_field(AMPLITUDES, q, e, z)[0] ** 2

    re, _ = integrate.quad(lambda z: integrand(z).real, 0.0, e, epsabs=0.0, epsrel=1e-13)
    im, _ = integrate.quad(lambda z: integrand(z).imag, 0.0, e, epsabs=0.0, epsrel=1e-13)
    result = layer_perturbation_integral(*AMPLITUDES, layer, layer.gradient, DIURNAL)
    assert result == pytest.approx(complex(re, im), rel=1e-9)


@pytest.mark.parametrize("beta_e", [-3.0, -1.0, 0.5, 3.0])
@pytest.mark.parametrize("re_qe", [0.1, 1.0, 5.0, 30.0])
@pytest.mark.parametrize("d1", [0.0, 2.7e6])
def test__closed_form_matches_quadrature(beta_e, re_qe, d1):
    layer = _graded(beta_e, d1)
    omega = 2.0 * layer.base().diffusivity * (re_qe / layer.thickness_m) ** 2
    result = layer_perturbation_integral(*AMPLITUDES, layer, layer.gradient, omega)
    expected, scale = _quadrature(layer, omega, AMPLITUDES)
    assert abs(result - expected) <= 1e-9 * scale


@pytest.mark.parametrize("re_qe", [0.5, 1.0, 2.0])
def test__closed_form_near_exponential_pole(re_qe):
    # β = 2·Re(q) makes one primitive's exponent purely imaginary.
    layer = _graded(2.0 * re_qe, 2.7e6)
    omega = 2.0 * layer.base().diffusivity * (re_qe / layer.thickness_m) ** 2
    result = layer_perturbation_integral(*AMPLITUDES, layer, layer.gradient, omega)
    expected, scale = _quadrature(layer, omega, AMPLITUDES)
    assert abs(result - expected) <= 1e-9 * scale


def test__integral_bounded_for_large_exponent():
    layer = _graded(1.0, 2.7e6)
    omega = 2.0 * layer.base().diffusivity * (1e4 / layer.thickness_m) ** 2
    result = layer_perturbation_integral(*AMPLITUDES, layer, layer.gradient, omega)
    assert np.isfinite(result)
    assert abs(result) < 1e30


def test__integral_rejects_zero_frequency(aac_layer):
    with pytest.raises(InputValidationError):
        layer_perturbation_integral(*AMPLITUDES, aac_layer, aac_layer.gradient, 0.0)


def test__bilinear_integral_is_symmetric(aac_layer):
    q = wave_vector(DIURNAL, aac_layer.base())
    profile = PerturbationProfile.about_equivalent(aac_layer)
    other = (0.1 + 0.9j, -0.4 + 0.2j)
    forward = bilinear_integral(profile, q, DIURNAL, AMPLITUDES, other)
    swapped = bilinear_integral(profile, q, DIURNAL, other, AMPLITUDES)
    assert forward == pytest.approx(swapped, rel=1e-13)


def test__mirrored_profile_is_the_same_deviation(aac_layer):
    profile = PerturbationProfile.about_equivalent(aac_layer)
    mirror = profile.mirrored()
    z = np.linspace(0.0, 0.2, 11)
    np.testing.assert_allclose(
        mirror.conductivity_deviation(z), profile.conductivity_deviation(0.2 - z), rtol=1e-12, atol=1e-14
    )
    np.testing.assert_allclose(
        mirror.capacity_deviation(z), profile.capacity_deviation(0.2 - z), rtol=1e-12, atol=1e-6
    )


def test__propagate_perturbation_zero_source():
    assert propagate_perturbation(0.0, 0.5 + 0.1j, 1.0, 0.0) == 0


def test__propagate_perturbation_carries_and_adds():
    g, t0, j = 0.5 + 0.1j, 0.8 - 0.2j, 0.03 + 0.01j
    result = propagate_perturbation(0.2, g, t0, j)
    assert result == pytest.approx(g**2 * 0.2 + j / t0**2)


def test__propagate_perturbation_gates_small_temperatures():
    result = propagate_perturbation(0.2, 0.5, 1e-9, 1.0, tau_noise=1e-6)
    assert result == pytest.approx(0.05)


def test__first_order_correction_accuracy(aac_wall):
    error = _relative_error(aac_wall)
    assert 0.0029 < error < 0.0059


def test__first_order_correction_without_gradient(aac_wall):
    wall = aac_wall.base()
    chain = first_order_chain(wall.layers, [None], wall.h_int, wall.h_ext, DIURNAL)
    assert chain.correction[-1] == 0
    assert chain.exterior == pytest.approx(forward_chain(wall, DIURNAL).exterior, rel=1e-14)


@pytest.mark.parametrize("graded_first", [True, False])
@pytest.mark.parametrize("omega", [DIURNAL / 7.0, DIURNAL, 24.0 * DIURNAL, 2.0 * np.pi / 600.0])
def test__scalar_first_order_exterior_matches_chain(aac_layer, concrete, graded_first, omega):
    layers = (aac_layer, concrete) if graded_first else (concrete, aac_layer)
    wall = WallAssembly(layers=layers, h_int=7.7, h_ext=18.0)
    profiles = [PerturbationProfile.about_interior(l) if l.has_gradient else None for l in layers]
    scalar = first_order_exterior(wall.base().layers, profiles, 7.7, 18.0, omega)
    chained = first_order_chain(wall.base().layers, profiles, 7.7, 18.0, np.array([omega])).exterior[0]
    assert isinstance(scalar, complex)
    assert scalar == pytest.approx(chained, rel=1e-12)


def test__scalar_first_order_exterior_rejects_zero_frequency(aac_wall):
    with pytest.raises(InputValidationError):
        first_order_exterior(aac_wall.base().layers, [None], 7.7, 18.0, 0.0)


def test__error_shrinks_faster_than_gradient(aac_layer):
    errors = []
    for factor in (1.0, 0.5, 0.25):
        layer = Layer(
            thickness_m=aac_layer.thickness_m,
            conductivity=aac_layer.conductivity,
            density=aac_layer.density,
            specific_heat=aac_layer.specific_heat,
            gradient=aac_layer.gradient.scaled(factor, aac_layer.conductivity),
        )
        errors.append(_relative_error(WallAssembly(layers=(layer,), h_int=7.7, h_ext=18.0)))
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] / errors[1] < 0.5


def test__correction_grows_linearly_with_gradient(aac_layer):
    corrections = []
    for factor in (0.5, 1.0):
        gradient = aac_layer.gradient.scaled(factor, aac_layer.conductivity)
        layer = Layer(
            thickness_m=0.2, conductivity=0.12, density=500.0, specific_heat=980.0, gradient=gradient
        )
        wall = WallAssembly(layers=(layer,), h_int=7.7, h_ext=18.0)
        profiles = [PerturbationProfile.about_interior(layer)]
        chain = first_order_chain(wall.base().layers, profiles, 7.7, 18.0, DIURNAL)
        corrections.append(abs(chain.correction[-1]))
    assert corrections[1] / corrections[0] == pytest.approx(2.0, rel=0.1)


def test__local_truncation_error(aac_layer):
    assert local_truncation_error(aac_layer) == pytest.approx(0.26667, rel=1e-4)
    assert local_truncation_error(aac_layer.base()) == 0.0


def test__truncation_error_bound(aac_wall):
    assert truncation_error_bound(aac_wall, None, DIURNAL) == pytest.approx(0.125316, rel=1e-4)
    assert truncation_error_bound(aac_wall.base(), None, DIURNAL) == 0.0


def test__truncation_error_bound_covers_realised_error(aac_wall):
    bound = truncation_error_bound(aac_wall, None, DIURNAL)
    assert _relative_error(aac_wall) < bound < local_truncation_error(aac_wall.layers[0])


def test__truncation_error_bound_with_gradient(aac_layer, aac_wall, concrete):
    own = truncation_error_bound(aac_wall, None, DIURNAL)
    plain = WallAssembly(layers=(aac_layer.base(),), h_int=7.7, h_ext=18.0)
    assert truncation_error_bound(plain, aac_layer.gradient, DIURNAL) == pytest.approx(own, rel=1e-12)
    halved = aac_layer.gradient.scaled(0.5, aac_layer.conductivity)
    assert truncation_error_bound(aac_wall, halved, DIURNAL) < own

    composite = WallAssembly(layers=(concrete, aac_layer.base()), h_int=7.7, h_ext=18.0)
    with pytest.raises(InputValidationError):
        truncation_error_bound(composite, aac_layer.gradient, DIURNAL)
    assert truncation_error_bound(composite, aac_layer.gradient, DIURNAL, layer_index=1) > 0.0


def test__unknown_recombination_rejected(aac_wall):
    with pytest.raises(InputValidationError):
        PerturbedModel(aac_wall, recombination="average")


@pytest.mark.parametrize("recombination", ["reciprocal", "exterior", "recomputed"])
def test__stationary_gains_use_exact_resistance(aac_wall, recombination):
    state = PerturbedModel(aac_wall, recombination).gains(np.array([0.0]))
    resistance = 1.0 / 7.7 + exact_stationary_resistance(aac_wall.layers[0]) + 1.0 / 18.0
    assert 7.7 * state.state_a_gain[0] == pytest.approx(1.0 / resistance, rel=1e-12)
    assert 7.7 * (1.0 - state.state_b_gain[0]) == pytest.approx(1.0 / resistance, rel=1e-12)


def test__reciprocal_gains_carry_gain_correction(aac_wall):
    w = np.array([0.0, DIURNAL])
    model = PerturbedModel(aac_wall, "reciprocal")
    state = model.gains(w)
    assert state.admittance_correction is None
    assert state.gain_correction[0] == 0
    assert abs(state.gain_correction[1]) > 0
    plain = harmonic_state(model.reference, w)
    np.testing.assert_allclose(state.state_a_gain - plain.state_a_gain, state.gain_correction, atol=1e-15)


@pytest.mark.parametrize("recombination", ["exterior", "recomputed"])
def test__chained_gains_carry_admittance_correction(aac_wall, recombination):
    w = np.array([DIURNAL])
    state = PerturbedModel(aac_wall, recombination).gains(w)
    assert state.gain_correction is None
    profiles = [PerturbationProfile.about_interior(aac_wall.layers[0])]
    chain = first_order_chain(aac_wall.base().layers, profiles, 7.7, 18.0, w)
    np.testing.assert_allclose(state.admittance_correction, chain.correction[-1], rtol=1e-12)


@pytest.mark.parametrize("recombination", ["reciprocal", "exterior", "recomputed"])
def test__homogeneous_wall_unchanged(insulated_wall, recombination):
    weather = synthetic_weather.diurnal_winter(days=3)
    setpoint = np.full(len(weather), 20.0)
    config = SimConfig()
    plain = simulate(insulated_wall, weather, setpoint, config)
    corrected = simulate_perturbed(insulated_wall, weather, setpoint, config, recombination)
    np.testing.assert_allclose(corrected.t_si, plain.t_si, rtol=0, atol=1e-12)
    assert corrected.diagnostics["peak_load_increase_Wm2"] == pytest.approx(0.0, abs=1e-9)
    assert corrected.diagnostics["max_correction_Wm2"] == pytest.approx(0.0, abs=1e-9)


def test__winter_correction_magnitude(aac_wall):
    weather = synthetic_weather.diurnal_winter(days=7)
    setpoint = np.full(len(weather), 20.0)
    config = SimConfig(warmup_duration=2 * 86400.0, detrend=False)
    result = simulate_perturbed(aac_wall, weather, setpoint, config)
    baseline = result.baseline
    assert np.mean(baseline.phi_in) == pytest.approx(11.8785, rel=1e-3)
    increase = result.diagnostics["peak_load_increase_Wm2"]
    assert increase == pytest.approx(np.max(result.phi_in) - np.max(baseline.phi_in), rel=1e-12)
    assert increase == pytest.approx(2.91, abs=0.15)
    assert result.diagnostics["peak_load_increase_rel"] == pytest.approx(0.219, abs=0.015)
    # Peaks of the two series need not coincide in time.
    assert result.diagnostics["max_correction_Wm2"] >= increase
    df = result.to_frame()
    assert {"T_si_corrected_C", "phi_in_corrected_Wm2"} <= set(df.columns)


@pytest.mark.slow
def test__reciprocal_correction_tracks_sliced_oracle(aac_wall):
    weather = synthetic_weather.diurnal_winter(days=7)
    setpoint = np.full(len(weather), 20.0)
    config = SimConfig(warmup_duration=2 * 86400.0, detrend=False)
    oracle = simulate(aac_wall, weather, setpoint, config, model=SlicedOracleModel(aac_wall, 10000))
    peak = np.max(oracle.phi_in)

    errors = {}
    for recombination in ("reciprocal", "exterior", "recomputed"):
        result = simulate_perturbed(aac_wall, weather, setpoint, config, recombination)
        errors[recombination] = np.max(np.abs(result.phi_in - oracle.phi_in))
    assert errors["reciprocal"] < 0.006 * peak
    assert errors["reciprocal"] <= min(errors["exterior"], errors["recomputed"])
