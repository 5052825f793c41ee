"""Synthetic weather series for the shipped scenarios and the tests."""

import numpy as np

from config import solver_config
from src.core import InputValidationError, WeatherSeries

DAY_S = solver_config.day_s


def _time_axis(days: float, dt: float) -> np.ndarray:
    n = int(round(days * DAY_S / dt))
    if n < 2:
        raise InputValidationError("synthetic weather needs at least 2 samples")
    return np.arange(n) * dt


def _daily_cosine(t: np.ndarray, amplitude: float, peak_hour: float) -> np.ndarray:
    return amplitude * np.cos(2.0 * np.pi * (t - peak_hour * 3600.0) / DAY_S)


def diurnal_winter(
    days: float = 7.0,
    dt: float = 3600.0,
    mean_c: float = -2.0,
    amplitude_c: float = 5.0,
    peak_hour: float = 15.0,
    solar_peak_wm2: float = 0.0,
) -> WeatherSeries:
    """Cosine air temperature, with an optional half-sine solar day from 6 h to 18 h."""
    t = _time_axis(days, dt)
    hour = (t % DAY_S) / 3600.0
    g_solar = np.where(
        (hour > 6.0) & (hour < 18.0), solar_peak_wm2 * np.sin(np.pi * (hour - 6.0) / 12.0), 0.0
    )
    return WeatherSeries(
        time_s=t,
        t_air=mean_c + _daily_cosine(t, amplitude_c, peak_hour),
        g_solar=g_solar,
    )


def clear_sky(
    days: float = 3.0,
    dt: float = 3600.0,
    mean_c: float = -2.0,
    amplitude_c: float = 5.0,
    depression_c: float = 15.0,
    depression_amplitude_c: float = 5.3,
    depression_peak_hour: float = 3.0,
) -> WeatherSeries:
    """Winter air temperature with a sky depressed below it, deepest before dawn."""
    weather = diurnal_winter(days, dt, mean_c, amplitude_c)
    t = weather.time_s
    depression = depression_c + _daily_cosine(t, depression_amplitude_c, depression_peak_hour)
    return WeatherSeries(
        time_s=t, t_air=weather.t_air, g_solar=weather.g_solar, t_sky=weather.t_air - depression
    )


def cloudy_sky(days: float = 3.0, dt: float = 3600.0, mean_c: float = -2.0, amplitude_c: float = 5.0) -> WeatherSeries:
    """Overcast sky radiating at air temperature."""
    weather = diurnal_winter(days, dt, mean_c, amplitude_c)
    return WeatherSeries(
        time_s=weather.time_s, t_air=weather.t_air, g_solar=weather.g_solar, t_sky=weather.t_air
    )


def front(
    flat_days: float = 1.0,
    ramp_days: float = 7.0,
    dt: float = 3600.0,
    start_c: float = 15.0,
    end_c: float = 5.0,
) -> WeatherSeries:
    """Constant air temperature, then a linear drop of `start_c − end_c` over `ramp_days`."""
    t = _time_axis(flat_days + ramp_days, dt)
    ramp = np.clip((t - flat_days * DAY_S) / (ramp_days * DAY_S), 0.0, 1.0)
    return WeatherSeries(
        time_s=t, t_air=start_c + (end_c - start_c) * ramp, g_solar=np.zeros_like(t)
    )


def stochastic(
    days: float = 21.0,
    dt: float = 300.0,
    seed: int = 7,
    mean_c: float = 2.0,
    amplitude_c: float = 4.0,
    noise_c: float = 1.5,
    correlation_s: float = 6 * 3600.0,
    solar_peak_wm2: float = 350.0,
) -> WeatherSeries:
    """Diurnal cycle plus an AR(1) perturbation, reproducible from `seed`."""
    rng = np.random.default_rng(seed)
    t = _time_axis(days, dt)
    phi = np.exp(-dt / correlation_s)
    shocks = rng.normal(0.0, noise_c * np.sqrt(1.0 - phi**2), size=t.size)
    noise = np.empty_like(t)
    noise[0] = rng.normal(0.0, noise_c)
    for n in range(1, t.size):
        noise[n] = phi * noise[n - 1] + shocks[n]

    hour = (t % DAY_S) / 3600.0
    cloudiness = rng.uniform(0.3, 1.0, size=int(np.ceil(days)))[(t // DAY_S).astype(int)]
    g_solar = np.where(
        (hour > 7.0) & (hour < 17.0),
        cloudiness * solar_peak_wm2 * np.sin(np.pi * (hour - 7.0) / 10.0),
        0.0,
    )
    return WeatherSeries(
        time_s=t, t_air=mean_c + _daily_cosine(t, amplitude_c, 15.0) + noise, g_solar=g_solar
    )
