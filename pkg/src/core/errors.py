import numpy as np


class InputValidationError(ValueError):
    """Invalid configuration, weather data or violated precondition."""


class NumericalDefectError(ArithmeticError):
    """Non-finite value produced on a primary computation path."""

    def __init__(self, message: str, omega: float | None = None):
        if omega is not None:
            message = f"{message} (omega = {omega:.9g} rad/s)"
        super().__init__(message)
        self.omega = omega


class DegenerateError(NumericalDefectError):
    """Singular closed-form expression (vanishing denominator)."""


def ensure_finite(values, what: str, omega=None) -> None:
    """Raise NumericalDefectError if any entry of `values` is not finite.

    Args:
        values: Scalar or array to check.
        what (str): Name of the quantity, used in the message.
        omega: Angular frequencies matching the last axis of `values`, used to
            identify the offending harmonic.
    """
    arr = np.asarray(values)
    bad = ~np.isfinite(arr)
    if not np.any(bad):
        return

    offending = None
    if omega is not None:
        w = np.broadcast_to(np.asarray(omega, dtype=float), arr.shape[-1:] if arr.ndim else ())
        columns = bad.reshape(-1, bad.shape[-1]).any(axis=0) if arr.ndim else bad
        offending = float(w[np.argmax(columns)]) if arr.ndim else float(w)
    raise NumericalDefectError(f"non-finite {what}", omega=offending)
