"""Time ↔ frequency bridge and the transient wall simulation.

Spectra are normalised by 1/M and only the Hermitian half k = 0..M/2 is kept,
so a bin amplitude is in Kelvin whatever the series length.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, is_dataclass, replace
from typing import Protocol

import numpy as np
import pandas as pd

from config import solver_config
from src.core import (
    InputValidationError,
    NumericalDefectError,
    WallAssembly,
    WeatherSeries,
)
from src.solvers.propagator import HarmonicState, ZeroOrderModel

logger = logging.getLogger("app")

TREND_RESPONSES = ("lag", "quasi_static")
REALNESS_TOLERANCE = 1e-10


class TransferModel(Protocol):
    def gains(self, omega) -> HarmonicState: ...


@dataclass(frozen=True)
class SimConfig:
    warmup_duration: float = 2 * 86400.0
    detrend: bool = True
    solar_absorptivity: float = 0.6
    noise_threshold: float = solver_config.tau_noise
    trend_response: str = "lag"
    threads: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.warmup_duration) and self.warmup_duration >= 0):
            raise InputValidationError("sim.warmup_s must be >= 0")
        if not 0.0 <= self.solar_absorptivity <= 1.0:
            raise InputValidationError("sim.solar_absorptivity must lie in [0, 1]")
        if not self.noise_threshold > 0:
            raise InputValidationError("sim.noise_threshold must be > 0")
        if self.trend_response not in TREND_RESPONSES:
            raise InputValidationError(
                f"sim.trend_response must be one of {TREND_RESPONSES}, got {self.trend_response!r}"
            )
        if self.threads < 1:
            raise InputValidationError("threads must be >= 1")


@dataclass
class SpectralSeries:
    """Real series paired with its normalised Hermitian half spectrum."""

    dt: float
    samples: np.ndarray
    spectrum: np.ndarray
    trend: tuple[float, float] | None = None

    @classmethod
    def from_samples(cls, samples, dt: float, detrend: bool = False) -> "SpectralSeries":
        values = np.asarray(samples, dtype=float)
        trend = None
        residual = values
        if detrend:
            residual, trend = detrend_linear(values, dt)
        return cls(dt=dt, samples=values, spectrum=forward_transform(residual), trend=trend)

    @property
    def omega(self) -> np.ndarray:
        return angular_frequencies(len(self.samples), self.dt)

    def reconstruct(self) -> np.ndarray:
        series = inverse_transform(self.spectrum, len(self.samples))
        if self.trend is not None:
            intercept, slope = self.trend
            series = series + intercept + slope * np.arange(len(series)) * self.dt
        return series


@dataclass
class SimulationResult:
    """Active-horizon series; `baseline` holds the uncorrected run when a correction applies."""

    time_s: np.ndarray
    t_sa: np.ndarray
    t_in: np.ndarray
    t_si: np.ndarray
    phi_in: np.ndarray
    diagnostics: dict = field(default_factory=dict)
    baseline: "SimulationResult | None" = None

    def to_frame(self) -> pd.DataFrame:
        reference = self.baseline or self
        df = pd.DataFrame(
            {
                "time_s": self.time_s,
                "T_sa_C": reference.t_sa,
                "T_si_C": reference.t_si,
                "phi_in_Wm2": reference.phi_in,
            }
        )
        if self.baseline is not None:
            df["T_si_corrected_C"] = self.t_si
            df["phi_in_corrected_Wm2"] = self.phi_in
        return df


def angular_frequencies(size: int, dt: float) -> np.ndarray:
    """ω_k = 2πk/(M·Δt) for k = 0..M/2."""
    return 2.0 * np.pi * np.arange(size // 2 + 1) / (size * dt)


def forward_transform(samples) -> np.ndarray:
    """Normalised half spectrum X_k = (1/M)·Σ x_n e^{-2πikn/M}, k = 0..M/2."""
    x = np.asarray(samples, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise InputValidationError("forward_transform needs a 1-D series of at least 2 samples")
    if not np.all(np.isfinite(x)):
        raise InputValidationError("forward_transform input contains non-finite samples")
    return np.fft.rfft(x) / x.size


def inverse_transform(spectrum, size: int) -> np.ndarray:
    """Real series of length `size` from its normalised Hermitian half spectrum."""
    half = np.asarray(spectrum, dtype=complex)
    if half.shape != (size // 2 + 1,):
        raise InputValidationError(
            f"spectrum of {half.size} bins does not match a series of {size} samples"
        )
    tail = half[-2:0:-1] if size % 2 == 0 else half[:0:-1]
    full = np.concatenate([half, np.conj(tail)])
    series = np.fft.ifft(full) * size

    peak = np.max(np.abs(series.real))
    residue = np.max(np.abs(series.imag))
    if residue > REALNESS_TOLERANCE * peak:
        raise NumericalDefectError(
            f"reconstructed series is not real (imaginary residue {residue:.3g}, peak {peak:.3g})"
        )
    return series.real


def detrend_linear(samples, dt: float = 1.0) -> tuple[np.ndarray, tuple[float, float]]:
    """Remove the least-squares line; returns (residual, (intercept, slope per second))."""
    x = np.asarray(samples, dtype=float)
    t = np.arange(x.size) * dt
    slope, intercept = np.polyfit(t, x, 1)
    return x - (intercept + slope * t), (float(intercept), float(slope))


def pad_history(
    values,
    dt: float,
    warmup_duration: float,
    history=None,
    day_s: float = solver_config.day_s,
) -> tuple[np.ndarray, int]:
    """Prepend a warm-up sequence and return (padded, number of warm-up samples).

    The default history replicates the first day periodically, so the padded
    series ends the warm-up on the phase that precedes the first sample.
    """
    x = np.asarray(values, dtype=float)
    n_warmup = int(round(warmup_duration / dt))
    if n_warmup == 0:
        return x.copy(), 0

    if history is not None:
        past = np.asarray(history, dtype=float)
        if past.size < n_warmup:
            raise InputValidationError(
                f"history holds {past.size} samples, warm-up needs {n_warmup}"
            )
        prefix = past[-n_warmup:]
    else:
        n_day = min(max(int(round(day_s / dt)), 1), x.size)
        day = x[:n_day]
        prefix = np.tile(day, -(-n_warmup // n_day))[-n_warmup:]

    return np.concatenate([prefix, x]), n_warmup


def dominant_time_constant(assembly: WallAssembly) -> float:
    """Advisory fundamental-mode estimate (Σe/λ)(Σρc_p·e)/π² [s]."""
    resistance = sum(layer.resistance for layer in assembly.layers)
    capacity = sum(layer.vol_heat_capacity * layer.thickness_m for layer in assembly.layers)
    return resistance * capacity / np.pi**2


def sol_air(t_air, g_solar, h_ext: float, solar_absorptivity: float):
    """T_sa = T_air + a_s·G/h_ext; longwave sky exchange lives in the radiative module."""
    if not 0.0 <= solar_absorptivity <= 1.0:
        raise InputValidationError("solar absorptivity must lie in [0, 1]")
    return np.asarray(t_air, dtype=float) + solar_absorptivity * np.asarray(
        g_solar, dtype=float
    ) / h_ext


def _concatenate(items: list):
    first = items[0]
    if is_dataclass(first):
        return replace(
            first,
            **{
                f.name: _concatenate([getattr(item, f.name) for item in items])
                for f in fields(first)
            },
        )
    if isinstance(first, np.ndarray):
        return np.concatenate(items, axis=-1)
    return first


def evaluate_gains(model: TransferModel, omega: np.ndarray, threads: int = 1) -> HarmonicState:
    """Per-harmonic gains, optionally split over a thread pool.

    Harmonics are independent, so the result does not depend on `threads`.
    """
    if threads <= 1 or omega.size < 2 * threads:
        return model.gains(omega)
    chunks = np.array_split(omega, threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        states = list(pool.map(model.gains, chunks))
    return _concatenate(states)


class HarmonicSynthesis:
    """Frequency grid, gains and reconstruction shared by the series of one padded window."""

    def __init__(self, n_samples: int, dt: float, config: SimConfig, model: TransferModel):
        if not dt > 0:
            raise InputValidationError("time step must be > 0")
        self.dt = dt
        self.config = config
        self.model = model
        self.n_warmup = int(round(config.warmup_duration / dt))
        self.size = n_samples + self.n_warmup
        self.omega = angular_frequencies(self.size, dt)
        self.state = evaluate_gains(model, self.omega, config.threads)
        self.near_dc = model.gains(np.array([solver_config.trend_lag_omega]))

    def pad(self, values, history=None) -> np.ndarray:
        padded, _ = pad_history(values, self.dt, self.config.warmup_duration, history)
        return padded

    def decompose(self, padded) -> SpectralSeries:
        return SpectralSeries.from_samples(padded, self.dt, detrend=self.config.detrend)

    def first_moment(self, near_dc_gain) -> float:
        """∫t·h(t)dt of the impulse response, from the phase of H at a tiny ω."""
        if self.config.trend_response == "quasi_static":
            return 0.0
        return -float(np.imag(near_dc_gain)) / solver_config.trend_lag_omega

    def synthesize(self, spectrum) -> np.ndarray:
        """Padded-window series of a half spectrum on this grid."""
        spectrum = np.array(spectrum, dtype=complex)
        # Bin 0 and the Nyquist bin of an even window carry real samples only.
        spectrum[0] = spectrum[0].real
        if self.size % 2 == 0:
            spectrum[-1] = spectrum[-1].real
        return inverse_transform(spectrum, self.size)

    def respond(self, series: SpectralSeries, gain, near_dc_gain) -> np.ndarray:
        """Padded-window response of a linear channel with per-harmonic `gain`."""
        response = self.synthesize(np.asarray(gain) * series.spectrum)

        if series.trend is not None:
            intercept, slope = series.trend
            t = np.arange(self.size) * self.dt
            response = (
                response
                + np.real(gain[0]) * (intercept + slope * t)
                - slope * self.first_moment(near_dc_gain)
            )
        return response

    def crop(self, padded) -> np.ndarray:
        return np.asarray(padded)[self.n_warmup :]

    def interior_surface(self, t_sa_padded, t_in_padded) -> np.ndarray:
        """Padded T_si from both boundary channels."""
        state, near_dc = self.state, self.near_dc
        return self.respond(
            self.decompose(t_sa_padded), state.state_a_gain, near_dc.state_a_gain[0]
        ) + self.respond(self.decompose(t_in_padded), state.state_b_gain, near_dc.state_b_gain[0])

    def exterior_surface(self, t_sa_padded, t_in_padded) -> np.ndarray:
        """Padded exterior surface temperature from both boundary channels."""
        state, near_dc = self.state, self.near_dc
        return self.respond(
            self.decompose(t_sa_padded), state.surface_a_gain, near_dc.surface_a_gain[0]
        ) + self.respond(
            self.decompose(t_in_padded), state.surface_b_gain, near_dc.surface_b_gain[0]
        )


def build_result(
    assembly: WallAssembly,
    weather: WeatherSeries,
    t_sa,
    setpoint,
    t_si,
    synth: HarmonicSynthesis,
    started: float,
    **diagnostics,
) -> SimulationResult:
    t_in = np.asarray(setpoint, dtype=float)
    phi_in = assembly.h_int * (t_in - t_si)
    diagnostics.setdefault("omega", synth.omega)
    diagnostics.setdefault("gain_magnitude", np.abs(synth.state.transfer.global_factor))
    diagnostics["elapsed_ms"] = (time.perf_counter() - started) * 1e3
    return SimulationResult(
        time_s=np.asarray(weather.time_s, dtype=float),
        t_sa=np.asarray(t_sa, dtype=float),
        t_in=t_in,
        t_si=t_si,
        phi_in=phi_in,
        diagnostics=diagnostics,
    )


def check_setpoint(weather: WeatherSeries, setpoint) -> np.ndarray:
    t_in = np.asarray(setpoint, dtype=float)
    if t_in.shape != (len(weather),):
        raise InputValidationError(
            f"setpoint has {t_in.size} samples, weather has {len(weather)}"
        )
    return t_in


def check_history(weather: WeatherSeries, history: WeatherSeries) -> None:
    if abs(history.dt - weather.dt) > 1e-6 * weather.dt:
        raise InputValidationError(
            f"history time step {history.dt:g} s differs from weather time step {weather.dt:g} s"
        )


def history_setpoint(history: WeatherSeries, t_in) -> np.ndarray:
    """Setpoint over the history; held at the first active value without a T_set column."""
    return history.setpoint(float(np.asarray(t_in)[0]))


def simulate(
    assembly: WallAssembly,
    weather: WeatherSeries,
    setpoint,
    config: SimConfig,
    model: TransferModel | None = None,
    t_sa=None,
    history: WeatherSeries | None = None,
    history_t_sa=None,
) -> SimulationResult:
    """Transient interior surface temperature and flux of a wall.

    Args:
        assembly (WallAssembly): Wall to simulate.
        weather (WeatherSeries): Exterior boundary series.
        setpoint: Interior air temperature series [°C], same grid as `weather`.
        config (SimConfig): Warm-up, detrending and solar settings.
        model (TransferModel | None, optional): Per-harmonic gains. Defaults to
            the zero-order model of `assembly`.
        t_sa (optional): Sol-air series overriding the one built from `weather`.
        history (WeatherSeries | None, optional): Measured weather preceding
            `weather`; its last `warmup_duration` seconds replace the default
            first-day replication.
        history_t_sa (optional): Sol-air series overriding the one built from
            `history`.

    Returns:
        SimulationResult: Active-horizon T_si and Φ_in = h_int·(T_in − T_si).
    """
    started = time.perf_counter()
    t_in = check_setpoint(weather, setpoint)
    if t_sa is None:
        t_sa = sol_air(weather.t_air, weather.g_solar, assembly.h_ext, config.solar_absorptivity)

    past_t_sa = past_t_in = None
    if history is not None:
        check_history(weather, history)
        if history_t_sa is None:
            history_t_sa = sol_air(
                history.t_air, history.g_solar, assembly.h_ext, config.solar_absorptivity
            )
        past_t_sa, past_t_in = history_t_sa, history_setpoint(history, t_in)

    synth = HarmonicSynthesis(len(weather), weather.dt, config, model or ZeroOrderModel(assembly))
    t_si = synth.crop(
        synth.interior_surface(synth.pad(t_sa, past_t_sa), synth.pad(t_in, past_t_in))
    )
    logger.debug(f"simulated {len(weather)} samples over {synth.omega.size} harmonics")
    return build_result(assembly, weather, t_sa, t_in, t_si, synth, started)
