"""Nonlinear longwave exchange at the exterior surface.

The LTI pass carries the sky exchange linearised with a constant h_rad. The
difference between exact Stefan–Boltzmann exchange and that linear term is a
time-domain residual, mapped back into the frequency domain as a gated
pseudo-admittance acting on the exterior boundary in a single extra pass.
"""

import logging
import math
import time
from dataclasses import dataclass, replace

import numpy as np

from config import solver_config
from src.core import InputValidationError, WallAssembly, WeatherSeries, ensure_finite
from src.solvers.propagator import ZeroOrderModel, outward_pass
from src.solvers.spectral import (
    HarmonicSynthesis,
    SimConfig,
    SimulationResult,
    build_result,
    check_history,
    check_setpoint,
    forward_transform,
    history_setpoint,
    simulate,
    sol_air,
)

logger = logging.getLogger("app")

STEFAN_BOLTZMANN = 5.670374419e-8
KELVIN = 273.15
CLOSURES = ("exterior", "chain")


@dataclass(frozen=True)
class RadiativeConfig:
    """Longwave exchange settings.

    `linearization_temperature` [K] defaults to the horizon-mean air
    temperature once a weather series is known (see `resolved`).
    """

    emissivity: float = 0.9
    sigma: float = STEFAN_BOLTZMANN
    linearization_temperature: float | None = None
    tau_noise: float = solver_config.tau_noise
    closure: str = "exterior"

    def __post_init__(self):
        if not 0.0 <= self.emissivity <= 1.0:
            raise InputValidationError("radiative.emissivity must lie in [0, 1]")
        if not self.sigma > 0:
            raise InputValidationError("radiative.sigma must be > 0")
        if self.linearization_temperature is not None and not (
            math.isfinite(self.linearization_temperature) and self.linearization_temperature > 0
        ):
            raise InputValidationError("radiative.T_lin_K must be > 0")
        if not self.tau_noise > 0:
            raise InputValidationError("radiative.tau_noise must be > 0")
        if self.closure not in CLOSURES:
            raise InputValidationError(
                f"radiative.closure must be one of {CLOSURES}, got {self.closure!r}"
            )

    def resolved(self, t_air_c) -> "RadiativeConfig":
        if self.linearization_temperature is not None:
            return self
        return replace(
            self, linearization_temperature=float(np.mean(t_air_c)) + KELVIN
        )


def linearized_h_rad(config: RadiativeConfig) -> float:
    """h_rad = 4·ε·σ·T_lin³ [W/(m²·K)]."""
    if config.linearization_temperature is None:
        raise InputValidationError("linearization temperature is not resolved")
    return 4.0 * config.emissivity * config.sigma * config.linearization_temperature**3


def radiative_residual(t_surf_k, t_sky_k, config: RadiativeConfig) -> np.ndarray:
    """ΔΦ = εσ(T_s⁴ − T_sky⁴) − h_rad·(T_s − T_sky), temperatures in Kelvin."""
    t_s = np.asarray(t_surf_k, dtype=float)
    t_sky = np.asarray(t_sky_k, dtype=float)
    exact = config.emissivity * config.sigma * (t_s**4 - t_sky**4)
    return exact - linearized_h_rad(config) * (t_s - t_sky)


def pseudo_admittance(residual_spectrum, surface_spectrum, tau_noise: float) -> np.ndarray:
    """Y1_N(ω) = ΔΦ̃/T̃_s where |T̃_s| ≥ τ_noise, 0 elsewhere."""
    residual = np.asarray(residual_spectrum, dtype=complex)
    surface = np.asarray(surface_spectrum, dtype=complex)
    kept = np.abs(surface) >= tau_noise
    ratio = residual / np.where(kept, surface, 1.0)
    return np.where(kept, ratio, 0.0)


def sky_sol_air(weather: WeatherSeries, h_ext: float, solar_absorptivity: float, h_rad: float):
    """Sol-air temperature including the linearised sky exchange."""
    if weather.t_sky is None:
        raise InputValidationError("radiative mode needs a T_sky_C weather column")
    return sol_air(weather.t_air, weather.g_solar, h_ext, solar_absorptivity) + h_rad / h_ext * (
        np.asarray(weather.t_sky) - np.asarray(weather.t_air)
    )


def _chain_closure_shift(assembly: WallAssembly, synth: HarmonicSynthesis, y1, t_sa_padded, t_in_padded):
    """Spectrum of the T_si shift when Y1 also initialises the inward chain."""
    state = synth.state
    y_n = state.exterior_admittance
    t_sa = forward_transform(t_sa_padded)
    t_in = forward_transform(t_in_padded)

    shift_a = -state.transfer.global_factor * state.surface_a_gain * t_sa * y1 / (
        assembly.h_ext + y_n + y1
    )
    mirrored, _ = outward_pass(
        assembly.mirrored().layers, assembly.h_ext + y1, synth.omega
    )
    state_b = assembly.h_int / (assembly.h_int + mirrored[-1])
    return shift_a + (state_b - state.state_b_gain) * t_in


def simulate_radiative(
    assembly: WallAssembly,
    weather: WeatherSeries,
    setpoint,
    config: SimConfig,
    radiative: RadiativeConfig,
    history: WeatherSeries | None = None,
) -> SimulationResult:
    """Single-pass correction of the interior response for exact sky exchange.

    Args:
        assembly (WallAssembly): Wall to simulate.
        weather (WeatherSeries): Weather with a sky temperature column.
        setpoint: Interior air temperature series [°C].
        config (SimConfig): Spectral simulation settings.
        radiative (RadiativeConfig): Longwave exchange settings.
        history (WeatherSeries | None): Weather preceding the run, used as
            warm-up; it needs a sky temperature column too.

    Returns:
        SimulationResult: Corrected series with the linearised run as `baseline`.
    """
    started = time.perf_counter()
    t_in = check_setpoint(weather, setpoint)
    radiative = radiative.resolved(weather.t_air)
    h_rad = linearized_h_rad(radiative)
    t_sa = sky_sol_air(weather, assembly.h_ext, config.solar_absorptivity, h_rad)

    past_t_sa = past_t_in = past_t_sky = None
    if history is not None:
        check_history(weather, history)
        past_t_sa = sky_sol_air(history, assembly.h_ext, config.solar_absorptivity, h_rad)
        past_t_in = history_setpoint(history, t_in)
        past_t_sky = history.t_sky

    baseline = simulate(assembly, weather, t_in, config, t_sa=t_sa, history=history, history_t_sa=past_t_sa)

    synth = HarmonicSynthesis(len(weather), weather.dt, config, ZeroOrderModel(assembly))
    t_sa_padded, t_in_padded = synth.pad(t_sa, past_t_sa), synth.pad(t_in, past_t_in)
    t_surf = synth.exterior_surface(t_sa_padded, t_in_padded)
    t_sky = synth.pad(weather.t_sky, past_t_sky)
    residual = radiative_residual(t_surf + KELVIN, t_sky + KELVIN, radiative)

    residual_spectrum = forward_transform(residual)
    y1 = pseudo_admittance(residual_spectrum, forward_transform(t_surf), radiative.tau_noise)
    # The mean flux enters in source form.
    y1[0] = 0.0
    gated = int(np.count_nonzero(y1[1:] == 0))
    logger.debug(f"pseudo-admittance : {gated} of {y1.size - 1} bins gated")

    state = synth.state
    if radiative.closure == "chain":
        shift = _chain_closure_shift(assembly, synth, y1, t_sa_padded, t_in_padded)
        shift[0] = -state.transfer.global_factor[0] * residual_spectrum[0] / (
            assembly.h_ext + state.exterior_admittance[0]
        )
    else:
        shift = -state.transfer.global_factor * residual_spectrum / (
            assembly.h_ext + state.exterior_admittance + y1
        )
    ensure_finite(shift, "radiative correction", synth.omega)

    t_si = baseline.t_si + synth.crop(synth.synthesize(shift))
    result = build_result(
        assembly,
        weather,
        t_sa,
        t_in,
        t_si,
        synth,
        started,
        h_rad=h_rad,
        closure=radiative.closure,
        gated_bins=gated,
        residual_peak_Wm2=float(np.max(np.abs(synth.crop(residual)))),
        pseudo_admittance=y1,
    )
    logger.info(
        f"radiative residual : peak {result.diagnostics['residual_peak_Wm2']:.2f} W/m², h_rad {h_rad:.3f}"
    )
    return replace(result, baseline=baseline)
