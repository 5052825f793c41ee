"""Bounded admittance propagation across a wall assembly.

Admittances follow Y = λ·T'/T with x pointing outward. The forward chain
starts at the interior film (Y_0 = h_int), the backward chain at the exterior
film and runs inward over the mirrored assembly. Every function broadcasts over
an array of angular frequencies; ω = 0 is dispatched to the stationary
series-resistance rules.
"""

import logging
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from config import solver_config
from src.core import (
    DegenerateError,
    InputValidationError,
    Layer,
    WallAssembly,
    as_omega,
    ensure_finite,
    wave_vector,
)

logger = logging.getLogger("app")


@dataclass(frozen=True)
class AdmittanceChain:
    """Admittances Y_0..Y_N at the interfaces, in physical (interior→exterior) order."""

    direction: Literal["outward", "inward"]
    omega: np.ndarray
    values: np.ndarray

    @property
    def interior(self) -> np.ndarray:
        return self.values[0]

    @property
    def exterior(self) -> np.ndarray:
        return self.values[-1]


@dataclass(frozen=True)
class TransferChain:
    """Per-layer transfer factors g_j and their product G(ω)."""

    omega: np.ndarray
    factors: np.ndarray
    global_factor: np.ndarray


@dataclass(frozen=True)
class HarmonicState:
    """Per-harmonic response of an assembly to its two boundary excitations.

    Gains are ratios of complex amplitudes: `state_a_gain` = T_si/T_sa,
    `state_b_gain` = T_si/T_in, and the `surface_*` gains give the exterior
    surface temperature for the same excitations. A first-order model fills
    `gain_correction` (ΔH_A added to the state A gain) or
    `admittance_correction` (Y1_N added to the exterior admittance).
    """

    omega: np.ndarray
    forward: AdmittanceChain
    backward: AdmittanceChain
    transfer: TransferChain
    mirrored_transfer: TransferChain
    state_a_gain: np.ndarray
    state_b_gain: np.ndarray
    surface_a_gain: np.ndarray
    surface_b_gain: np.ndarray
    gain_correction: np.ndarray | None = None
    admittance_correction: np.ndarray | None = None

    @property
    def exterior_admittance(self) -> np.ndarray:
        return self.forward.exterior

    @property
    def interior_admittance(self) -> np.ndarray:
        return self.backward.interior


def _mobius(y_prev, y_c, x):
    # Only e^{-2qe} appears, so the map stays finite for any Re(qe).
    e2 = np.exp(-2.0 * x)
    one_minus = -np.expm1(-2.0 * x)
    one_plus = 1.0 + e2
    return y_c * (y_prev * one_plus + y_c * one_minus) / (
        y_c * one_plus + y_prev * one_minus
    )


def _attenuation(y_prev, y_c, x, active=True):
    e1 = np.exp(-x)
    denominator = y_c * (1.0 + np.exp(-2.0 * x)) + y_prev * (-np.expm1(-2.0 * x))
    if np.any(np.abs(denominator)[np.broadcast_to(active, np.shape(denominator))]
              < solver_config.transfer_floor):
        raise DegenerateError("degenerate transfer factor")
    return 2.0 * y_c * e1 / denominator


def outward_pass(
    layers: Sequence[Layer],
    y0,
    omega,
    resistances: Sequence[float] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Admittances and transfer factors of one interior→exterior sweep.

    Args:
        layers (Sequence[Layer]): Layers in sweep order (zero-order media).
        y0: Admittance closing the start of the sweep, scalar or per-ω array.
        omega: Angular frequencies [rad/s].
        resistances (Sequence[float] | None, optional): Stationary layer
            resistances used at ω = 0. Defaults to e/λ of each layer.

    Returns:
        tuple[np.ndarray, np.ndarray]: Admittances (N+1, ...) and factors (N, ...).
    """
    w = as_omega(omega)
    dynamic = w > 0
    w_dyn = np.where(dynamic, w, 1.0)

    y = np.array(np.broadcast_to(np.asarray(y0, dtype=complex), w.shape))
    values = [y]
    factors = []
    for j, layer in enumerate(layers):
        q = (1.0 + 1.0j) * np.sqrt(w_dyn / (2.0 * layer.diffusivity))
        y_c = layer.conductivity * q
        x = q * layer.thickness_m
        resistance = layer.resistance if resistances is None else resistances[j]

        y_real = y.real
        with np.errstate(divide="ignore", invalid="ignore"):
            y_static = 1.0 / (1.0 / y_real + resistance)
        g_static = 1.0 / (1.0 + y_real * resistance)

        g = np.where(dynamic, _attenuation(y, y_c, x, dynamic), g_static)
        y = np.where(dynamic, _mobius(y, y_c, x), y_static)
        values.append(y)
        factors.append(g)

    return np.stack(values), np.stack(factors)


def propagate_layer(y_prev, layer: Layer, omega):
    """Admittance at the outer face of `layer` given Y_prev at its inner face."""
    w = as_omega(omega)
    if np.any(w == 0):
        raise InputValidationError(
            "propagate_layer needs omega > 0, use propagate_layer_stationary"
        )
    y = np.asarray(y_prev, dtype=complex)
    ensure_finite(y, "input admittance")
    q = wave_vector(w, layer)
    result = _mobius(y, layer.conductivity * q, q * layer.thickness_m)
    ensure_finite(result, "propagated admittance", w)
    return result


def propagate_layer_stationary(y_prev, layer: Layer, resistance: float | None = None):
    """Series-resistance update 1/(1/Y_prev + R), R = e/λ unless given."""
    y = np.asarray(y_prev)
    if np.iscomplexobj(y):
        if np.any(y.imag != 0):
            raise InputValidationError("stationary admittance must be real")
        y = y.real
    if np.any(~(y > 0)):
        raise InputValidationError("stationary propagation needs Y_prev > 0")
    r = layer.resistance if resistance is None else resistance
    return 1.0 / (1.0 / y + r)


def layer_transfer_factor(y_prev, layer: Layer, omega):
    """Temperature ratio g_j = T(x_{j-1})/T(x_j) across `layer`."""
    w = as_omega(omega)
    if np.any(w == 0):
        raise InputValidationError("layer_transfer_factor needs omega > 0")
    y = np.asarray(y_prev, dtype=complex)
    q = wave_vector(w, layer)
    g = _attenuation(y, layer.conductivity * q, q * layer.thickness_m)
    ensure_finite(g, "transfer factor", w)
    return g


def forward_chain(assembly: WallAssembly, omega) -> AdmittanceChain:
    w = as_omega(omega)
    values, _ = outward_pass(assembly.layers, assembly.h_int, w)
    ensure_finite(values, "forward admittance", w)
    return AdmittanceChain(direction="outward", omega=w, values=values)


def backward_chain(assembly: WallAssembly, omega) -> AdmittanceChain:
    """Inward chain started at Y⃐_N = h_ext, returned in physical interface order."""
    w = as_omega(omega)
    mirror = assembly.mirrored()
    values, _ = outward_pass(mirror.layers, mirror.h_int, w)
    ensure_finite(values, "backward admittance", w)
    return AdmittanceChain(direction="inward", omega=w, values=values[::-1])


def global_transfer(assembly: WallAssembly, omega) -> TransferChain:
    w = as_omega(omega)
    _, factors = outward_pass(assembly.layers, assembly.h_int, w)
    ensure_finite(factors, "transfer factor", w)
    return TransferChain(omega=w, factors=factors, global_factor=np.prod(factors, axis=0))


def surface_quotient(h_ext: float, y_n, t_sa):
    """Exterior surface temperature h_ext/(h_ext + Y_N)·T_sa."""
    return h_ext / (h_ext + np.asarray(y_n)) * t_sa


def state_A_surface(assembly: WallAssembly, omega, t_sa):
    """Exterior surface temperature under sol-air excitation, interior grounded."""
    chain = forward_chain(assembly, omega)
    return surface_quotient(assembly.h_ext, chain.exterior, t_sa)


def state_B_response(assembly: WallAssembly, omega, t_in):
    """Interior surface temperature under interior excitation, exterior grounded."""
    mirror = assembly.mirrored()
    return state_A_surface(mirror, omega, t_in)


def harmonic_state(
    assembly: WallAssembly, omega, resistances: Sequence[float] | None = None
) -> HarmonicState:
    """Evaluate both superposition states of `assembly` in one pass per direction."""
    w = as_omega(omega)
    layers = assembly.layers
    fwd_values, fwd_factors = outward_pass(layers, assembly.h_int, w, resistances)
    mirrored_resistances = None if resistances is None else list(resistances)[::-1]
    mir_values, mir_factors = outward_pass(
        layers[::-1], assembly.h_ext, w, mirrored_resistances
    )

    transfer = np.prod(fwd_factors, axis=0)
    mirrored_transfer = np.prod(mir_factors, axis=0)
    surface_a = assembly.h_ext / (assembly.h_ext + fwd_values[-1])
    state_b = assembly.h_int / (assembly.h_int + mir_values[-1])
    state_a = transfer * surface_a

    ensure_finite(state_a, "state A gain", w)
    ensure_finite(state_b, "state B gain", w)

    return HarmonicState(
        omega=w,
        forward=AdmittanceChain("outward", w, fwd_values),
        backward=AdmittanceChain("inward", w, mir_values[::-1]),
        transfer=TransferChain(w, fwd_factors, transfer),
        mirrored_transfer=TransferChain(w, mir_factors, mirrored_transfer),
        state_a_gain=state_a,
        state_b_gain=state_b,
        surface_a_gain=surface_a,
        surface_b_gain=mirrored_transfer * state_b,
    )


def superpose(assembly: WallAssembly, omega, t_sa, t_in):
    """Interior surface temperature T_si = G·T_surf + T_si^B."""
    state = harmonic_state(assembly, omega)
    return state.state_a_gain * t_sa + state.state_b_gain * t_in


class ZeroOrderModel:
    """Homogeneous (zero-order) response of an assembly."""

    def __init__(self, assembly: WallAssembly):
        self.assembly = assembly

    def gains(self, omega) -> HarmonicState:
        return harmonic_state(self.assembly, omega)
