import numpy as np

from src.core.errors import InputValidationError
from src.core.layers import Layer


def as_omega(omega) -> np.ndarray:
    """Validate angular frequencies (ω ≥ 0, finite) and return them as an array."""
    w = np.asarray(omega, dtype=float)
    if not np.all(np.isfinite(w)):
        raise InputValidationError("angular frequency must be finite")
    if np.any(w < 0):
        # q(-ω) = conj(q(ω)) is supplied by the Hermitian half spectrum.
        raise InputValidationError("angular frequency must be non-negative")
    return w


def wave_vector(omega, layer: Layer):
    """Complex thermal wave vector q = (1+i)·√(ω/2α) [1/m]."""
    w = as_omega(omega)
    return (1.0 + 1.0j) * np.sqrt(w / (2.0 * layer.diffusivity))


def characteristic_admittance(omega, layer: Layer):
    """Admittance of the semi-infinite medium, Y_c = λ·q = √(iωρc_pλ)."""
    return layer.conductivity * wave_vector(omega, layer)


def penetration_depth(omega, layer: Layer):
    """Depth √(2α/ω) at which a harmonic decays by 1/e [m]."""
    w = as_omega(omega)
    if np.any(w == 0):
        raise InputValidationError("infinite penetration depth at omega = 0")
    return np.sqrt(2.0 * layer.diffusivity / w)
