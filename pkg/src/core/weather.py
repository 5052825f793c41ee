from dataclasses import dataclass

import numpy as np

from src.core.errors import InputValidationError


def first_irregular_sample(time_s, rtol: float = 1e-6) -> int | None:
    """Index of the first sample whose step departs from the first step, if any."""
    t = np.asarray(time_s, dtype=float)
    steps = np.diff(t)
    if steps.size == 0 or not steps[0] > 0:
        return 1 if steps.size else None
    bad = np.flatnonzero(np.abs(steps - steps[0]) > rtol * steps[0])
    return int(bad[0]) + 1 if bad.size else None


@dataclass(frozen=True)
class WeatherSeries:
    """Uniformly sampled boundary conditions, temperatures in °C."""

    time_s: np.ndarray
    t_air: np.ndarray
    g_solar: np.ndarray
    t_sky: np.ndarray | None = None
    t_set: np.ndarray | None = None

    def __post_init__(self):
        n = len(self.time_s)
        if n < 2:
            raise InputValidationError("weather series needs at least 2 samples")
        for name in ("t_air", "g_solar", "t_sky", "t_set"):
            values = getattr(self, name)
            if values is not None and len(values) != n:
                raise InputValidationError(
                    f"weather column {name} has {len(values)} samples, expected {n}"
                )
        irregular = first_irregular_sample(self.time_s)
        if irregular is not None:
            raise InputValidationError(
                f"non-uniform or non-ascending time_s at sample {irregular}"
            )

    @property
    def dt(self) -> float:
        return float(self.time_s[1] - self.time_s[0])

    def __len__(self) -> int:
        return len(self.time_s)

    def setpoint(self, default: float) -> np.ndarray:
        """Interior setpoint series; constant `default` when no column was given."""
        if self.t_set is not None:
            return np.asarray(self.t_set, dtype=float)
        return np.full(len(self), default, dtype=float)
