"""First-order correction of the admittance chain for graded layers.

A graded layer is written as a homogeneous reference medium plus a deviation
δλ(z) = λ_s·e^{βz} − λ_r, δC(z) = c_off + d1·z, with z measured from the
layer's interior face. Zero-order fields are expressed in the bounded basis
T(z) = Ã·e^{−q(e−z)} + B̃·e^{−qz}, so the closed-form primitives only ever
involve e^{−qe}, e^{−2qe} and moderate e^{±βe} factors.
"""

import cmath
import logging
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy import integrate

from config import solver_config
from src.core import (
    DegenerateError,
    GradientSpec,
    InputValidationError,
    Layer,
    NumericalDefectError,
    WallAssembly,
    WeatherSeries,
    as_omega,
    ensure_finite,
)
from src.solvers.propagator import (
    AdmittanceChain,
    HarmonicState,
    TransferChain,
    _attenuation,
    harmonic_state,
    outward_pass,
)
from src.solvers.spectral import SimConfig, SimulationResult, simulate

logger = logging.getLogger("app")

RECOMBINATIONS = ("reciprocal", "exterior", "recomputed")
SERIES_TERMS = 20
POLE_RADIUS = 1e-6


@dataclass(frozen=True)
class PerturbationProfile:
    """Property deviation of one layer from a homogeneous reference medium."""

    thickness: float
    lambda_scale: float
    beta: float
    lambda_ref: float
    capacity_offset: float
    d1: float

    @classmethod
    def about_interior(cls, layer: Layer) -> "PerturbationProfile":
        """Deviation from the interior-face medium (λ_0, (ρc_p)_0)."""
        return cls(
            thickness=layer.thickness_m,
            lambda_scale=layer.conductivity,
            beta=layer.beta,
            lambda_ref=layer.conductivity,
            capacity_offset=0.0,
            d1=layer.d1,
        )

    @classmethod
    def about_equivalent(cls, layer: Layer) -> "PerturbationProfile":
        """Deviation from `equivalent_layer(layer)`."""
        e = layer.thickness_m
        return cls(
            thickness=e,
            lambda_scale=layer.conductivity,
            beta=layer.beta,
            lambda_ref=e / exact_stationary_resistance(layer),
            capacity_offset=-0.5 * layer.d1 * e,
            d1=layer.d1,
        )

    @property
    def is_null(self) -> bool:
        return (
            self.beta == 0.0
            and self.d1 == 0.0
            and self.capacity_offset == 0.0
            and self.lambda_scale == self.lambda_ref
        )

    def mirrored(self) -> "PerturbationProfile":
        """Same deviation seen from the exterior face (z' = e − z)."""
        e = self.thickness
        return PerturbationProfile(
            thickness=e,
            lambda_scale=self.lambda_scale * math.exp(self.beta * e),
            beta=-self.beta,
            lambda_ref=self.lambda_ref,
            capacity_offset=self.capacity_offset + self.d1 * e,
            d1=-self.d1,
        )

    def conductivity_deviation(self, z):
        return self.lambda_scale * np.exp(self.beta * np.asarray(z)) - self.lambda_ref

    def capacity_deviation(self, z):
        return self.capacity_offset + self.d1 * np.asarray(z)


@dataclass(frozen=True)
class PerturbedLayerSolution:
    index: int
    amplitudes: tuple[np.ndarray, np.ndarray]
    integral: np.ndarray
    correction: np.ndarray


@dataclass(frozen=True)
class FirstOrderChain:
    """Zero-order chain of one sweep and its first-order correction Y1 per interface."""

    omega: np.ndarray
    zero_order: np.ndarray
    factors: np.ndarray
    temperatures: np.ndarray
    correction: np.ndarray
    layers: tuple[PerturbedLayerSolution, ...]

    @property
    def exterior(self) -> np.ndarray:
        return self.zero_order[-1] + self.correction[-1]


def equivalent_layer(layer: Layer) -> Layer:
    """Homogeneous layer with the exact stationary resistance and mean capacity."""
    if not layer.has_gradient:
        return layer.base()
    e = layer.thickness_m
    return layer.homogeneous(
        e / exact_stationary_resistance(layer),
        layer.vol_heat_capacity + 0.5 * layer.d1 * e,
    )


def exact_stationary_resistance(layer: Layer, gradient=None) -> float:
    """R = (1 − e^{−βe})/(βλ_0) for λ(z) = λ_0·e^{βz}; e/λ_0 without gradient."""
    gradient = gradient if gradient is not None else layer.gradient
    if gradient is None:
        return layer.resistance
    e = layer.thickness_m
    beta = gradient.beta(layer.conductivity, e)
    x = beta * e
    if x == 0.0:
        return layer.resistance
    return e * (-math.expm1(-x) / x) / layer.conductivity


def bounded_amplitudes(t_inner, t_outer, q, thickness: float):
    """Solve T(0) = Ã·e^{−qe} + B̃, T(e) = Ã + B̃·e^{−qe} for (Ã, B̃).

    Raises:
        DegenerateError: when |1 − e^{−2qe}| falls below the degeneracy threshold.
    """
    x = np.asarray(q, dtype=complex) * thickness
    e1 = np.exp(-x)
    det = -np.expm1(-2.0 * x)
    if np.any(np.abs(det) < solver_config.degenerate_threshold):
        raise DegenerateError("degenerate stratum")
    t_in = np.asarray(t_inner, dtype=complex)
    t_out = np.asarray(t_outer, dtype=complex)
    return (t_out - e1 * t_in) / det, (t_in - e1 * t_out) / det


def zero_order_field(amplitudes, q, thickness: float, z):
    """Temperature and its gradient of the bounded-basis field at depth z."""
    a, b = amplitudes
    z = np.asarray(z, dtype=float)
    u = np.exp(-q * (thickness - z))
    v = np.exp(-q * z)
    return a * u + b * v, q * (a * u - b * v)


def _exprel(w):
    w = np.asarray(w, dtype=complex)
    small = np.abs(w) < POLE_RADIUS
    safe = np.where(small, 1.0, w)
    return np.where(small, 1.0 + w / 2.0 + w * w / 6.0, np.expm1(safe) / safe)


def _moment_integrals(a, e: float):
    """∫z·e^{−a(e−z)}dz and ∫z·e^{−az}dz over [0, e]."""
    w = a * e
    small = np.abs(w) < 0.5

    a_safe = np.where(small, 1.0, a)
    w_safe = a_safe * e
    k_v = (1.0 - np.exp(-w_safe) * (1.0 + w_safe)) / a_safe**2
    k_u = e * (-np.expm1(-w_safe)) / a_safe - k_v
    if not np.any(small):
        return k_u, k_v

    term = np.ones_like(w)
    series_u = np.zeros_like(w)
    series_v = np.zeros_like(w)
    for n in range(SERIES_TERMS):
        series_v = series_v + term / (n + 2)
        series_u = series_u + term / ((n + 1) * (n + 2))
        term = term * (-w) / (n + 1)
    return np.where(small, e * e * series_u, k_u), np.where(small, e * e * series_v, k_v)


def bilinear_integral(profile: PerturbationProfile, q, omega, first, second):
    """∫(δλ·T1'·T2' + iω·δC·T1·T2) dz for two bounded-basis fields of one layer.

    Args:
        profile (PerturbationProfile): Property deviation of the layer.
        q: Wave vector of the reference medium, per ω.
        omega: Angular frequencies [rad/s], all > 0.
        first (tuple): (Ã, B̃) of the first field.
        second (tuple): (Ã, B̃) of the second field.

    Returns:
        np.ndarray: Complex integral per ω.
    """
    q = np.asarray(q, dtype=complex)
    w = np.asarray(omega, dtype=float)
    if profile.is_null:
        return np.zeros(np.broadcast(q, first[0], second[0]).shape, dtype=complex)

    e = profile.thickness
    beta = profile.beta
    a1, b1 = first
    a2, b2 = second
    aa = a1 * a2
    bb = b1 * b2
    ab = a1 * b2 + a2 * b1

    x = q * e
    e1 = np.exp(-x)
    e2 = np.exp(-2.0 * x)
    i_0 = -np.expm1(-2.0 * x) / (2.0 * q)

    s = beta + 2.0 * q
    near = np.abs(s * e) < 1.0
    s_safe = np.where(near, 1.0, s)
    i_u_beta = np.where(
        near, e2 * e * _exprel(s * e), (math.exp(beta * e) - e2) / s_safe
    )
    i_v_beta = e * _exprel((beta - 2.0 * q) * e)
    i_beta = e * complex(_exprel(beta * e))

    j_res = q**2 * (
        profile.lambda_scale * (aa * i_u_beta + bb * i_v_beta - ab * e1 * i_beta)
        - profile.lambda_ref * (aa * i_0 + bb * i_0 - ab * e1 * e)
    )

    k_u, k_v = _moment_integrals(2.0 * q, e)
    j_cap = 1j * w * (
        profile.d1 * (aa * k_u + bb * k_v + ab * e1 * e * e / 2.0)
        + profile.capacity_offset * (aa * i_0 + bb * i_0 + ab * e1 * e)
    )
    return j_res + j_cap


def layer_perturbation_integral(a, b, layer: Layer, gradient, omega):
    """Perturbation integral J of a graded layer about its interior-face medium."""
    w = as_omega(omega)
    if np.any(w == 0):
        raise InputValidationError("layer_perturbation_integral needs omega > 0")
    graded = replace(layer, gradient=gradient) if gradient is not layer.gradient else layer
    base = graded.base()
    q = (1.0 + 1.0j) * np.sqrt(w / (2.0 * base.diffusivity))
    profile = PerturbationProfile.about_interior(graded)
    result = bilinear_integral(profile, q, w, (a, b), (a, b))
    ensure_finite(result, "perturbation integral", w)
    return result


def propagate_perturbation(y1_prev, g, t0_outer, integral, tau_noise: float = None):
    """Y1(x_j) = g_j²·Y1(x_{j−1}) + J_j/T0(x_j)², the source skipped below τ_noise."""
    tau = solver_config.tau_noise if tau_noise is None else tau_noise
    g = np.asarray(g, dtype=complex)
    t0 = np.asarray(t0_outer, dtype=complex)
    carried = g**2 * np.asarray(y1_prev, dtype=complex)
    gated = np.abs(t0) < tau
    with np.errstate(divide="ignore", invalid="ignore"):
        source = np.asarray(integral, dtype=complex) / np.where(gated, 1.0, t0) ** 2
    return np.where(gated, carried, carried + source)


def first_order_chain(
    layers: Sequence[Layer],
    profiles: Sequence[PerturbationProfile | None],
    y0,
    far_film: float,
    omega,
    tau_noise: float = None,
    resistances: Sequence[float] | None = None,
) -> FirstOrderChain:
    """Zero-order sweep plus the first-order correction for graded layers.

    Interface temperatures are those of a unit excitation behind `far_film`;
    ω = 0 entries use the stationary chain and carry no correction.
    """
    w = as_omega(omega)
    values, factors = outward_pass(layers, y0, w, resistances)
    dynamic = w > 0
    w_dyn = np.where(dynamic, w, 1.0)

    n = len(layers)
    temperatures = [None] * (n + 1)
    temperatures[n] = far_film / (far_film + values[n])
    for j in range(n, 0, -1):
        temperatures[j - 1] = factors[j - 1] * temperatures[j]

    y1 = [np.zeros(w.shape, dtype=complex)]
    solutions = []
    for j, (layer, profile) in enumerate(zip(layers, profiles)):
        if profile is None or profile.is_null:
            y1.append(factors[j] ** 2 * y1[j])
            continue
        q = (1.0 + 1.0j) * np.sqrt(w_dyn / (2.0 * layer.diffusivity))
        amplitudes = bounded_amplitudes(temperatures[j], temperatures[j + 1], q, layer.thickness_m)
        integral = np.where(dynamic, bilinear_integral(profile, q, w_dyn, amplitudes, amplitudes), 0.0)
        y1.append(propagate_perturbation(y1[j], factors[j], temperatures[j + 1], integral, tau_noise))
        solutions.append(PerturbedLayerSolution(j, amplitudes, integral, y1[-1]))

    correction = np.where(dynamic, np.stack(y1), 0.0)
    ensure_finite(correction, "first-order admittance", w)
    return FirstOrderChain(
        omega=w,
        zero_order=values,
        factors=factors,
        temperatures=np.stack(temperatures),
        correction=correction,
        layers=tuple(solutions),
    )


def first_order_exterior(
    layers: Sequence[Layer],
    profiles: Sequence[PerturbationProfile | None],
    y0: float,
    far_film: float,
    omega: float,
    tau_noise: float = None,
) -> complex:
    """Corrected exterior admittance Y_N + Y1_N at a single ω > 0.

    Same recursion as `first_order_chain` in scalar arithmetic, keeping only
    the last interface.
    """
    w = float(omega)
    if not w > 0:
        raise InputValidationError("first_order_exterior needs omega > 0")
    tau = solver_config.tau_noise if tau_noise is None else tau_noise

    y = complex(y0)
    media = []
    for layer in layers:
        q = (1.0 + 1.0j) * math.sqrt(w / (2.0 * layer.diffusivity))
        y_c = layer.conductivity * q
        x = q * layer.thickness_m
        e1 = cmath.exp(-x)
        one_plus = 1.0 + e1 * e1
        one_minus = -complex(np.expm1(-2.0 * x))
        denominator = y_c * one_plus + y * one_minus
        if abs(denominator) < solver_config.transfer_floor:
            raise DegenerateError("degenerate transfer factor")
        media.append((q, e1, one_minus, 2.0 * y_c * e1 / denominator))
        y = y_c * (y * one_plus + y_c * one_minus) / denominator

    temperatures = [far_film / (far_film + y)]
    for *_, g in reversed(media):
        temperatures.append(g * temperatures[-1])
    temperatures.reverse()

    y1 = 0j
    for j, (profile, (q, e1, one_minus, g)) in enumerate(zip(profiles, media)):
        y1 = g * g * y1
        if profile is None or profile.is_null:
            continue
        if abs(one_minus) < solver_config.degenerate_threshold:
            raise DegenerateError("degenerate stratum")
        t_in, t_out = temperatures[j], temperatures[j + 1]
        if abs(t_out) < tau:
            continue
        amplitudes = ((t_out - e1 * t_in) / one_minus, (t_in - e1 * t_out) / one_minus)
        y1 += complex(bilinear_integral(profile, q, w, amplitudes, amplitudes)) / t_out**2

    if not (cmath.isfinite(y) and cmath.isfinite(y1)):
        raise NumericalDefectError("non-finite first-order admittance", omega=w)
    return y + y1

def _recomputed_factors(chain: FirstOrderChain, layers: Sequence[Layer]) -> np.ndarray:
    w = chain.omega
    dynamic = w > 0
    w_dyn = np.where(dynamic, w, 1.0)
    factors = []
    for j, layer in enumerate(layers):
        q = (1.0 + 1.0j) * np.sqrt(w_dyn / (2.0 * layer.diffusivity))
        y_prev = chain.zero_order[j] + chain.correction[j]
        g = _attenuation(y_prev, layer.conductivity * q, q * layer.thickness_m, dynamic)
        factors.append(np.where(dynamic, g, chain.factors[j]))
    return np.stack(factors)


class PerturbedModel:
    """First-order corrected response of an assembly with graded layers.

    Args:
        assembly (WallAssembly): Wall, graded layers included.
        recombination (str, optional): How the correction reaches the
            interior gains: "reciprocal" (default), "exterior" or "recomputed".
        tau_noise (float, optional): Temperature gate of the Y1 sources [K].
    """

    def __init__(
        self,
        assembly: WallAssembly,
        recombination: str = "reciprocal",
        tau_noise: float = None,
    ):
        if recombination not in RECOMBINATIONS:
            raise InputValidationError(
                f"perturbation.recombination must be one of {RECOMBINATIONS}, got {recombination!r}"
            )
        self.assembly = assembly
        self.recombination = recombination
        self.tau_noise = solver_config.tau_noise if tau_noise is None else tau_noise
        self.resistances = [exact_stationary_resistance(layer) for layer in assembly.layers]
        self.reference = WallAssembly(
            layers=tuple(equivalent_layer(layer) for layer in assembly.layers),
            h_int=assembly.h_int,
            h_ext=assembly.h_ext,
        )
        self.graded = [j for j, layer in enumerate(assembly.layers) if layer.has_gradient]

    def gains(self, omega) -> HarmonicState:
        w = as_omega(omega)
        if self.recombination == "reciprocal":
            return self._reciprocal(w)
        return self._chained(w)

    def _reciprocal(self, w: np.ndarray) -> HarmonicState:
        state = harmonic_state(self.reference, w)
        if not self.graded:
            return state

        dynamic = w > 0
        w_dyn = np.where(dynamic, w, 1.0)
        n = self.reference.n_layers
        fwd_g = state.transfer.factors
        mir_g = state.mirrored_transfer.factors

        t_a = [None] * (n + 1)
        t_a[n] = state.surface_a_gain
        for j in range(n, 0, -1):
            t_a[j - 1] = fwd_g[j - 1] * t_a[j]
        t_b = [state.state_b_gain]
        for j in range(n):
            t_b.append(mir_g[n - 1 - j] * t_b[j])

        delta_a = np.zeros(w.shape, dtype=complex)
        delta_b = np.zeros(w.shape, dtype=complex)
        for j in self.graded:
            layer = self.assembly.layers[j]
            reference = self.reference.layers[j]
            profile = PerturbationProfile.about_equivalent(layer)
            q = (1.0 + 1.0j) * np.sqrt(w_dyn / (2.0 * reference.diffusivity))
            amp_a = bounded_amplitudes(t_a[j], t_a[j + 1], q, layer.thickness_m)
            amp_b = bounded_amplitudes(t_b[j], t_b[j + 1], q, layer.thickness_m)
            delta_a = delta_a + bilinear_integral(profile, q, w_dyn, amp_a, amp_b)
            delta_b = delta_b + bilinear_integral(profile, q, w_dyn, amp_b, amp_b)

        h_int = self.assembly.h_int
        delta_a = np.where(dynamic, -delta_a / h_int, 0.0)
        delta_b = np.where(dynamic, -delta_b / h_int, 0.0)
        ensure_finite(delta_a, "state A correction", w)
        ensure_finite(delta_b, "state B correction", w)
        logger.debug(f"reciprocal correction over {len(self.graded)} graded layer(s)")
        return replace(
            state,
            state_a_gain=state.state_a_gain + delta_a,
            state_b_gain=state.state_b_gain + delta_b,
            gain_correction=delta_a,
        )

    def _chained(self, w: np.ndarray) -> HarmonicState:
        assembly = self.assembly
        base = assembly.base()
        profiles = [
            PerturbationProfile.about_interior(layer) if layer.has_gradient else None
            for layer in assembly.layers
        ]
        forward = first_order_chain(
            base.layers, profiles, assembly.h_int, assembly.h_ext, w, self.tau_noise, self.resistances
        )
        mirrored = first_order_chain(
            base.layers[::-1],
            [None if p is None else p.mirrored() for p in profiles[::-1]],
            assembly.h_ext,
            assembly.h_int,
            w,
            self.tau_noise,
            self.resistances[::-1],
        )

        if self.recombination == "recomputed":
            fwd_factors = _recomputed_factors(forward, base.layers)
            mir_factors = _recomputed_factors(mirrored, base.layers[::-1])
        else:
            fwd_factors, mir_factors = forward.factors, mirrored.factors

        transfer = np.prod(fwd_factors, axis=0)
        mirrored_transfer = np.prod(mir_factors, axis=0)
        surface_a = assembly.h_ext / (assembly.h_ext + forward.exterior)
        state_b = assembly.h_int / (assembly.h_int + mirrored.exterior)
        state_a = transfer * surface_a
        ensure_finite(state_a, "state A gain", w)
        ensure_finite(state_b, "state B gain", w)

        return HarmonicState(
            omega=w,
            forward=AdmittanceChain("outward", w, forward.zero_order + forward.correction),
            backward=AdmittanceChain(
                "inward", w, (mirrored.zero_order + mirrored.correction)[::-1]
            ),
            transfer=TransferChain(w, fwd_factors, transfer),
            mirrored_transfer=TransferChain(w, mir_factors, mirrored_transfer),
            state_a_gain=state_a,
            state_b_gain=state_b,
            surface_a_gain=surface_a,
            surface_b_gain=mirrored_transfer * state_b,
            admittance_correction=forward.correction[-1],
        )


def local_truncation_error(layer: Layer) -> float:
    """Algebraic remainder ε²/(1+ε) of the first-order expansion at the exterior face."""
    eps = math.expm1(layer.beta * layer.thickness_m)
    return eps**2 / (1.0 + eps)


def truncation_error_bound(
    assembly: WallAssembly,
    gradient: GradientSpec | None,
    omega: float,
    layer_index: int | None = None,
) -> float:
    """Relative bound of the neglected second-order term for one graded layer.

    Integrates λ_0·|T0'|²·ε²/(1+ε) over the layer, ε(z) = e^{βz} − 1, with the
    zero-order field of a unit exterior excitation, and normalises it by
    |Y_j·T0(x_j)²| at the layer's exterior face.

    Args:
        assembly (WallAssembly): Wall holding the graded layer.
        gradient (GradientSpec | None): Gradient to bound in place of the
            layer's own; None keeps the layer's gradient.
        omega (float): Angular frequency [rad/s], > 0.
        layer_index (int | None, optional): Layer to bound. Defaults to the
            first graded layer, or the only layer of a single-layer wall.

    Returns:
        float: Dimensionless bound, 0 when the layer has no conductivity gradient.
    """
    w = float(omega)
    if not (math.isfinite(w) and w > 0):
        raise InputValidationError("truncation_error_bound needs a scalar omega > 0")
    if layer_index is None:
        graded = [j for j, layer in enumerate(assembly.layers) if layer.has_gradient]
        if graded:
            layer_index = graded[0]
        elif gradient is not None and assembly.n_layers == 1:
            layer_index = 0
        elif gradient is not None:
            raise InputValidationError("truncation_error_bound needs layer_index for this wall")
        else:
            return 0.0
    if gradient is not None:
        layers = list(assembly.layers)
        layers[layer_index] = replace(layers[layer_index], gradient=gradient)
        assembly = replace(assembly, layers=tuple(layers))
    layer = assembly.layers[layer_index]
    if layer.beta == 0.0:
        return 0.0

    base = assembly.base()
    chain = first_order_chain(
        base.layers, [None] * base.n_layers, assembly.h_int, assembly.h_ext, np.array([w])
    )
    t_inner = chain.temperatures[layer_index][0]
    t_outer = chain.temperatures[layer_index + 1][0]
    y_outer = chain.zero_order[layer_index + 1][0]

    e = layer.thickness_m
    q = complex((1.0 + 1.0j) * math.sqrt(w / (2.0 * base.layers[layer_index].diffusivity)))
    amplitudes = bounded_amplitudes(t_inner, t_outer, q, e)

    def integrand(z: float) -> float:
        _, gradient = zero_order_field(amplitudes, q, e, z)
        eps = math.expm1(layer.beta * z)
        return layer.conductivity * abs(complex(gradient)) ** 2 * eps**2 / (1.0 + eps)

    value, _ = integrate.quad(integrand, 0.0, e, epsabs=0.0, epsrel=1e-10, limit=200)
    return value / abs(y_outer * t_outer**2)


def simulate_perturbed(
    assembly: WallAssembly,
    weather: WeatherSeries,
    setpoint,
    config: SimConfig,
    recombination: str = "reciprocal",
    history: WeatherSeries | None = None,
) -> SimulationResult:
    """Zero-order simulation and its first-order gradient correction.

    The peak-load increase compares the peaks of the two flux series, which
    need not fall on the same sample; the largest pointwise change is kept as
    `max_correction_Wm2`.

    Returns:
        SimulationResult: Corrected series with the zero-order run as `baseline`.
    """
    baseline = simulate(assembly, weather, setpoint, config, history=history)
    model = PerturbedModel(assembly, recombination, config.noise_threshold)
    corrected = simulate(assembly, weather, setpoint, config, model=model, history=history)

    baseline_peak = float(np.max(baseline.phi_in))
    increase = float(np.max(corrected.phi_in)) - baseline_peak
    diagnostics = corrected.diagnostics
    diagnostics["recombination"] = recombination
    diagnostics["peak_load_increase_Wm2"] = increase
    diagnostics["peak_load_increase_rel"] = increase / baseline_peak if baseline_peak != 0 else 0.0
    diagnostics["max_correction_Wm2"] = float(np.max(np.abs(corrected.phi_in - baseline.phi_in)))
    logger.info(
        f"gradient correction ({recombination}) : peak load {increase:+.3f} W/m² "
        f"({diagnostics['peak_load_increase_rel']:+.1%})"
    )
    return replace(corrected, baseline=baseline)
