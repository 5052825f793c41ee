from dataclasses import replace

import numpy as np
import pytest

from src.core import InputValidationError, WallAssembly, WeatherSeries
from src.extractors import synthetic_weather
from src.solvers import (
    KELVIN,
    STEFAN_BOLTZMANN,
    RadiativeConfig,
    SimConfig,
    iterative_radiative_oracle,
    linearized_h_rad,
    pseudo_admittance,
    radiative_residual,
    simulate,
    simulate_radiative,
)
from src.solvers.radiative import sky_sol_air

CONFIG = SimConfig(warmup_duration=2 * 86400.0, detrend=False)


@pytest.fixture
def homogeneous_aac(aac_wall) -> WallAssembly:
    return aac_wall.base()


def _run(wall, weather, radiative=RadiativeConfig()):
    return simulate_radiative(wall, weather, np.full(len(weather), 20.0), CONFIG, radiative)


def test__linearized_h_rad():
    config = RadiativeConfig(linearization_temperature=271.15)
    assert linearized_h_rad(config) == pytest.approx(4.0 * 0.9 * STEFAN_BOLTZMANN * 271.15**3)
    assert linearized_h_rad(config) == pytest.approx(4.069, abs=2e-3)


def test__h_rad_needs_linearization_temperature():
    with pytest.raises(InputValidationError):
        linearized_h_rad(RadiativeConfig())


def test__resolved_uses_mean_air_temperature():
    config = RadiativeConfig().resolved(np.array([-4.0, 0.0]))
    assert config.linearization_temperature == pytest.approx(271.15)
    fixed = RadiativeConfig(linearization_temperature=280.0)
    assert fixed.resolved(np.zeros(2)) is fixed


@pytest.mark.parametrize(
    "kwargs",
    [
        {"emissivity": 1.5},
        {"emissivity": -0.1},
        {"linearization_temperature": -10.0},
        {"tau_noise": 0.0},
        {"closure": "surface"},
    ],
)
def test__radiative_config_validation(kwargs):
    with pytest.raises(InputValidationError):
        RadiativeConfig(**kwargs)


def test__residual_vanishes_at_linearization_point():
    config = RadiativeConfig(linearization_temperature=271.15)
    assert radiative_residual(271.15, 271.15, config) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("delta", [1.0, 2.0, 5.0])
def test__residual_quadratic_bound(delta):
    t_lin = 271.15
    config = RadiativeConfig(linearization_temperature=t_lin)
    t_surf = t_lin + delta * np.sin(np.linspace(0.0, 2.0 * np.pi, 201))
    residual = radiative_residual(t_surf, np.full_like(t_surf, t_lin), config)
    bound = 6.0 * 0.9 * STEFAN_BOLTZMANN * (t_lin + delta) ** 2 * delta**2
    assert np.max(np.abs(residual)) <= bound


def test__pseudo_admittance_gates_small_surface_amplitudes():
    residual = np.array([2.0, 1.0 + 1.0j, 3.0])
    surface = np.array([4.0, 1e-9, 1.5j])
    y1 = pseudo_admittance(residual, surface, tau_noise=1e-6)
    assert y1[0] == pytest.approx(0.5)
    assert y1[1] == 0
    assert y1[2] == pytest.approx(-2.0j)


def test__pseudo_admittance_threshold_monotone():
    rng = np.random.default_rng(1)
    residual = rng.normal(size=50) + 1j * rng.normal(size=50)
    surface = 10.0 ** rng.uniform(-8, 0, size=50)
    kept = [np.count_nonzero(pseudo_admittance(residual, surface, tau)) for tau in (1e-8, 1e-6, 1e-4, 1e-2)]
    assert kept == sorted(kept, reverse=True)


def test__sky_sol_air():
    weather = synthetic_weather.clear_sky(days=1)
    t_sa = sky_sol_air(weather, 18.0, 0.6, 4.0)
    np.testing.assert_allclose(t_sa, weather.t_air + 4.0 / 18.0 * (weather.t_sky - weather.t_air))


def test__sky_temperature_required(homogeneous_aac):
    weather = synthetic_weather.diurnal_winter(days=3)
    with pytest.raises(InputValidationError):
        _run(homogeneous_aac, weather)


def test__black_surface_off_equals_linear_run(homogeneous_aac):
    weather = synthetic_weather.clear_sky()
    result = _run(homogeneous_aac, weather, RadiativeConfig(emissivity=0.0))
    plain = simulate(homogeneous_aac, weather, np.full(len(weather), 20.0), CONFIG)
    assert result.diagnostics["h_rad"] == 0.0
    np.testing.assert_allclose(result.t_si, plain.t_si, rtol=0, atol=1e-12)


def test__clear_sky_residual_and_correction(homogeneous_aac):
    weather = synthetic_weather.clear_sky()
    result = _run(homogeneous_aac, weather)
    assert result.diagnostics["residual_peak_Wm2"] == pytest.approx(12.0, abs=1.0)
    reduction = result.baseline.phi_in - result.phi_in
    assert np.all(reduction > 0)
    assert np.all(reduction < 1.0)
    df = result.to_frame()
    assert df["phi_in_corrected_Wm2"].max() < df["phi_in_Wm2"].max()


def test__cloudy_sky_correction_is_small(homogeneous_aac):
    weather = synthetic_weather.cloudy_sky()
    result = _run(homogeneous_aac, weather)
    assert result.diagnostics["residual_peak_Wm2"] < 1.0
    assert np.max(np.abs(result.phi_in - result.baseline.phi_in)) < 0.05


@pytest.mark.parametrize("closure", ["exterior", "chain"])
def test__single_pass_matches_iterative_oracle(homogeneous_aac, closure):
    weather = synthetic_weather.clear_sky()
    setpoint = np.full(len(weather), 20.0)
    radiative = RadiativeConfig(closure=closure)
    single = simulate_radiative(homogeneous_aac, weather, setpoint, CONFIG, radiative)
    oracle = iterative_radiative_oracle(homogeneous_aac, weather, setpoint, CONFIG, radiative)
    assert single.diagnostics["closure"] == closure
    assert np.max(np.abs(single.phi_in - oracle.phi_in)) < 0.1


def test__iterative_oracle_converges(homogeneous_aac):
    weather = synthetic_weather.clear_sky()
    result = iterative_radiative_oracle(
        homogeneous_aac, weather, np.full(len(weather), 20.0), CONFIG, RadiativeConfig()
    )
    changes = result.diagnostics["changes"]
    assert result.diagnostics["sweeps"] <= 20
    assert changes[-1] < 1e-4
    assert all(b < a for a, b in zip(changes, changes[1:]))


def test__iterative_oracle_without_exchange(homogeneous_aac):
    weather = synthetic_weather.clear_sky()
    result = iterative_radiative_oracle(
        homogeneous_aac, weather, np.full(len(weather), 20.0), CONFIG, RadiativeConfig(emissivity=0.0)
    )
    assert result.diagnostics["sweeps"] == 1


def test__pseudo_admittance_mean_bin_in_source_form(homogeneous_aac):
    weather = synthetic_weather.clear_sky()
    result = _run(homogeneous_aac, weather)
    y1 = result.diagnostics["pseudo_admittance"]
    assert y1[0] == 0
    assert y1.size == result.diagnostics["omega"].size


def test__kelvin_offset():
    assert KELVIN == 273.15
    weather = WeatherSeries(
        time_s=np.arange(2) * 3600.0, t_air=np.zeros(2), g_solar=np.zeros(2), t_sky=np.zeros(2)
    )
    assert replace(RadiativeConfig(), emissivity=0.5).resolved(weather.t_air).linearization_temperature == KELVIN


def _split(weather: WeatherSeries, n_past: int, sky: bool = True) -> tuple[WeatherSeries, WeatherSeries]:
    def window(part: slice, with_sky: bool) -> WeatherSeries:
        return WeatherSeries(
            time_s=weather.time_s[part],
            t_air=weather.t_air[part],
            g_solar=weather.g_solar[part],
            t_sky=weather.t_sky[part] if with_sky else None,
        )

    return window(slice(None, n_past), sky), window(slice(n_past, None), True)


def test__periodic_history_matches_replicated_warmup(homogeneous_aac):
    history, weather = _split(synthetic_weather.clear_sky(days=5), 48)
    setpoint = np.full(len(weather), 20.0)
    plain = _run(homogeneous_aac, weather)
    warmed = simulate_radiative(homogeneous_aac, weather, setpoint, CONFIG, RadiativeConfig(), history=history)
    np.testing.assert_allclose(warmed.t_si, plain.t_si, atol=1e-9)
    np.testing.assert_allclose(warmed.baseline.t_si, plain.baseline.t_si, atol=1e-9)


def test__history_needs_sky_temperature(homogeneous_aac):
    history, weather = _split(synthetic_weather.clear_sky(days=5), 48, sky=False)
    with pytest.raises(InputValidationError, match="T_sky_C"):
        simulate_radiative(
            homogeneous_aac, weather, np.full(len(weather), 20.0), CONFIG, RadiativeConfig(), history=history
        )
