"""Baselines and oracles.

The classic transfer-matrix method is kept with its overflow behaviour, as a
baseline for the bounded propagator; the sliced oracle replaces graded layers
by many thin homogeneous sub-layers and serves as ground truth.
"""

import logging
import math
import time
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from config import solver_config
from src.core import (
    InputValidationError,
    Layer,
    NumericalDefectError,
    WallAssembly,
    WeatherSeries,
    as_omega,
    ensure_finite,
    wave_vector,
)
from src.solvers.propagator import AdmittanceChain, ZeroOrderModel, harmonic_state, outward_pass
from src.solvers.radiative import (
    KELVIN,
    RadiativeConfig,
    linearized_h_rad,
    radiative_residual,
    sky_sol_air,
)
from src.solvers.spectral import (
    HarmonicSynthesis,
    SimConfig,
    SimulationResult,
    build_result,
    check_setpoint,
    forward_transform,
    simulate,
)

logger = logging.getLogger("app")

SLICE_BATCH = 500


@dataclass(frozen=True)
class TmmMatrix:
    """[[a, b], [c, d]] mapping (T, λT') from a layer's interior face to its exterior face."""

    a: complex
    b: complex
    c: complex
    d: complex

    @property
    def determinant(self) -> complex:
        return self.a * self.d - self.b * self.c

    def apply(self, temperature, flux):
        return self.a * temperature + self.b * flux, self.c * temperature + self.d * flux


@dataclass(frozen=True)
class OverflowReport:
    """Non-finite transfer-matrix evaluation, with the exponent that caused it."""

    re_qe: float
    layer_index: int | None
    omega: float
    stage: str

    @property
    def message(self) -> str:
        where = "" if self.layer_index is None else f" in layer {self.layer_index}"
        return (
            f"TMM overflow during {self.stage}{where}: "
            f"Re(qe) = {self.re_qe:.1f} at omega = {self.omega:.6g} rad/s"
        )


@dataclass(frozen=True)
class SlicedOracleResult:
    """Sliced-chain admittances and State A interface temperatures.

    `interfaces` holds the depth [m] of every sliced interface from the
    interior surface; temperatures are those of a unit sol-air excitation.
    """

    chain: AdmittanceChain
    interface_temperatures: np.ndarray
    interfaces: np.ndarray


@dataclass(frozen=True)
class FourierDiagnostic:
    fourier_number: float
    stable: bool


def _scalar_omega(omega) -> float:
    w = as_omega(omega)
    if w.ndim != 0:
        raise InputValidationError("the transfer-matrix reference takes one omega at a time")
    return float(w)


def tmm_layer_matrix(layer: Layer, omega, layer_index: int | None = None) -> TmmMatrix | OverflowReport:
    """Direct hyperbolic layer matrix, or an OverflowReport when an entry is not finite."""
    w = _scalar_omega(omega)
    e = layer.thickness_m
    if w == 0.0:
        return TmmMatrix(1.0 + 0j, complex(e / layer.conductivity), 0j, 1.0 + 0j)

    q = complex(wave_vector(w, layer))
    x = q * e
    y_c = layer.conductivity * q
    with np.errstate(over="ignore", invalid="ignore"):
        grow = np.exp(np.complex128(x))
        decay = np.exp(np.complex128(-x))
        cosh = (grow + decay) / 2.0
        sinh = (grow - decay) / 2.0
        entries = (cosh, sinh / y_c, y_c * sinh, cosh)
    if not all(np.isfinite(entry) for entry in entries):
        return OverflowReport(re_qe=x.real, layer_index=layer_index, omega=w, stage="layer matrix")
    return TmmMatrix(*(complex(entry) for entry in entries))


def tmm_admittance(assembly: WallAssembly, omega) -> complex | OverflowReport:
    """Exterior admittance Y_N by cascading layer matrices from (T, λT') = (1, h_int)."""
    w = _scalar_omega(omega)
    temperature, flux = np.complex128(1.0), np.complex128(assembly.h_int)
    worst = 0.0
    for j, layer in enumerate(assembly.layers):
        matrix = tmm_layer_matrix(layer, w, j)
        if isinstance(matrix, OverflowReport):
            logger.debug(matrix.message)
            return matrix
        if w > 0:
            worst = max(worst, complex(wave_vector(w, layer) * layer.thickness_m).real)
        with np.errstate(over="ignore", invalid="ignore"):
            temperature, flux = matrix.apply(temperature, flux)
        if not (np.isfinite(temperature) and np.isfinite(flux)):
            report = OverflowReport(re_qe=worst, layer_index=j, omega=w, stage="cascade")
            logger.debug(report.message)
            return report
    with np.errstate(invalid="ignore"):
        y_n = flux / temperature
    if not np.isfinite(y_n):
        return OverflowReport(re_qe=worst, layer_index=None, omega=w, stage="closure")
    return complex(y_n)


def overflow_boundary(alpha, period_s):
    """Thickness at which Re(qe) reaches the float64 exponent limit, 709/√(ω/2α) [m]."""
    a = np.asarray(alpha, dtype=float)
    p = np.asarray(period_s, dtype=float)
    if np.any(~(a > 0)) or np.any(~(p > 0)):
        raise InputValidationError("overflow_boundary needs alpha > 0 and period > 0")
    omega = 2.0 * np.pi / p
    # An infinite period never overflows.
    with np.errstate(divide="ignore"):
        result = solver_config.overflow_exponent / np.sqrt(omega / (2.0 * a))
    return float(result) if result.ndim == 0 else result


def sliced_layers(layer: Layer, slices: int) -> list[Layer]:
    """Midpoint-sampled homogeneous sub-layers of `layer`."""
    e = layer.thickness_m
    z = (np.arange(slices) + 0.5) * e / slices
    conductivity = layer.conductivity * np.exp(layer.beta * z)
    capacity = layer.vol_heat_capacity + layer.d1 * z
    return [
        Layer(
            thickness_m=e / slices,
            conductivity=float(lam),
            density=layer.density,
            specific_heat=float(cap) / layer.density,
            name=f"{layer.name}[{m}]",
        )
        for m, (lam, cap) in enumerate(zip(conductivity, capacity))
    ]


def sliced_assembly(assembly: WallAssembly, slices: int, slice_homogeneous: bool = False) -> WallAssembly:
    if isinstance(slices, bool) or not isinstance(slices, int) or slices < 1:
        raise InputValidationError(f"slices per layer must be an integer >= 1, got {slices!r}")
    layers = []
    for layer in assembly.layers:
        if layer.has_gradient or (slice_homogeneous and slices > 1):
            layers.extend(sliced_layers(layer, slices))
        else:
            layers.append(layer.base())
    return replace(assembly, layers=tuple(layers))


def sliced_oracle_admittance(
    assembly: WallAssembly,
    omega,
    slices: int,
    slice_homogeneous: bool = False,
    progress: Callable[[int, int], None] | None = None,
) -> SlicedOracleResult:
    """Forward chain of the sliced assembly, evaluated with the bounded propagator.

    Args:
        assembly (WallAssembly): Wall whose graded layers are sliced.
        omega: Angular frequencies [rad/s].
        slices (int): Sub-layers per graded layer, >= 1.
        slice_homogeneous (bool, optional): Slice homogeneous layers too.
        progress (Callable[[int, int], None] | None, optional): Receives
            (layers done, total layers) after each batch.

    Returns:
        SlicedOracleResult: Admittances, State A temperatures and interface depths.
    """
    w = as_omega(omega)
    sliced = sliced_assembly(assembly, slices, slice_homogeneous)
    layers = sliced.layers
    total = len(layers)

    y = assembly.h_int
    values, factors = [], []
    for start in range(0, total, SLICE_BATCH):
        batch = layers[start : start + SLICE_BATCH]
        batch_values, batch_factors = outward_pass(batch, y, w)
        values.append(batch_values if start == 0 else batch_values[1:])
        factors.append(batch_factors)
        y = batch_values[-1]
        if progress is not None:
            progress(min(start + SLICE_BATCH, total), total)

    values = np.concatenate(values)
    factors = np.concatenate(factors)
    ensure_finite(values, "sliced admittance", w)

    temperatures = np.empty_like(values)
    temperatures[-1] = assembly.h_ext / (assembly.h_ext + values[-1])
    for j in range(total, 0, -1):
        temperatures[j - 1] = factors[j - 1] * temperatures[j]

    depths = np.concatenate([[0.0], np.cumsum([layer.thickness_m for layer in layers])])
    return SlicedOracleResult(
        chain=AdmittanceChain("outward", w, values),
        interface_temperatures=temperatures,
        interfaces=depths,
    )


class SlicedOracleModel:
    """Response of the sliced assembly, used as the reference in simulations."""

    def __init__(self, assembly: WallAssembly, slices: int = solver_config.asymptote_slices):
        self.assembly = sliced_assembly(assembly, slices)
        self.slices = slices

    def gains(self, omega):
        return harmonic_state(self.assembly, omega)


def fourier_diagnostic(layer: Layer, dt: float, nodes: int = solver_config.fourier_nodes) -> FourierDiagnostic:
    """Explicit-scheme Fourier number αΔt/Δx² with Δx = e/nodes, stable when ≤ 0.5."""
    if not dt > 0 or nodes < 1:
        raise InputValidationError("fourier_diagnostic needs dt > 0 and nodes >= 1")
    dx = layer.thickness_m / nodes
    fourier_number = layer.diffusivity * dt / dx**2
    return FourierDiagnostic(fourier_number=fourier_number, stable=fourier_number <= 0.5)


def iterative_radiative_oracle(
    assembly: WallAssembly,
    weather: WeatherSeries,
    setpoint,
    config: SimConfig,
    radiative: RadiativeConfig,
    max_sweeps: int = 20,
    tolerance: float = 1e-4,
) -> SimulationResult:
    """Fixed point of the exterior surface balance with exact T⁴ exchange.

    Each sweep re-evaluates the residual on the current surface temperature and
    re-runs the frequency-domain pass in source form, until the surface
    temperature moves by less than `tolerance` [K].

    Raises:
        NumericalDefectError: when `max_sweeps` sweeps do not converge.
    """
    started = time.perf_counter()
    t_in = check_setpoint(weather, setpoint)
    radiative = radiative.resolved(weather.t_air)
    h_rad = linearized_h_rad(radiative)
    t_sa = sky_sol_air(weather, assembly.h_ext, config.solar_absorptivity, h_rad)
    baseline = simulate(assembly, weather, t_in, config, t_sa=t_sa)

    synth = HarmonicSynthesis(len(weather), weather.dt, config, ZeroOrderModel(assembly))
    state = synth.state
    surface_closure = assembly.h_ext + state.exterior_admittance
    t_surf0 = synth.exterior_surface(synth.pad(t_sa), synth.pad(t_in))
    t_sky = synth.pad(weather.t_sky) + KELVIN

    t_surf = t_surf0
    changes = []
    for sweep in range(1, max_sweeps + 1):
        residual = forward_transform(radiative_residual(t_surf + KELVIN, t_sky, radiative))
        updated = t_surf0 + synth.synthesize(-residual / surface_closure)
        changes.append(float(np.max(np.abs(updated - t_surf))))
        t_surf = updated
        logger.debug(f"radiative oracle sweep {sweep} : max change {changes[-1]:.3g} K")
        if changes[-1] < tolerance:
            break
    else:
        raise NumericalDefectError(
            f"radiative oracle did not converge in {max_sweeps} sweeps (last change {changes[-1]:.3g} K)"
        )

    shift = -state.transfer.global_factor * residual / surface_closure
    t_si = baseline.t_si + synth.crop(synth.synthesize(shift))
    result = build_result(
        assembly, weather, t_sa, t_in, t_si, synth, started, sweeps=len(changes), changes=changes
    )
    return replace(result, baseline=baseline)
