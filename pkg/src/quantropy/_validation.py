"""Input validation helpers shared by the functional API and the estimators."""

from __future__ import annotations

import cmath
import math
import os

import numpy as np

from .exceptions import InvalidInput, NonFiniteAction, InadmissibleClassicality

DEFAULT_MAX_HISTORIES = 1_000_000


def max_histories() -> int:
    """Product-space size cap, overridable through ``QUANTROPY_MAX_HISTORIES``."""
    raw = os.environ.get("QUANTROPY_MAX_HISTORIES")
    if raw is None or raw.strip() == "":
        return DEFAULT_MAX_HISTORIES
    try:
        cap = int(float(raw))
    except ValueError as exc:
        raise InvalidInput(f"QUANTROPY_MAX_HISTORIES is not a number: {raw!r}") from exc
    if cap < 1:
        raise InvalidInput("QUANTROPY_MAX_HISTORIES must be >= 1")
    return cap


def as_1d_float(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 2 and 1 in arr.shape:
        arr = arr.reshape(-1)
    if arr.ndim != 1:
        raise InvalidInput(f"{name} must be one-dimensional, got shape {arr.shape}")
    return arr


def check_actions(actions) -> np.ndarray:
    arr = as_1d_float(actions, "actions")
    if arr.size == 0:
        raise InvalidInput("a history space needs at least one history")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteAction("every action must be a finite real number")
    return arr


def check_weights(weights, size: int) -> np.ndarray:
    if weights is None:
        return np.ones(size)
    arr = as_1d_float(weights, "weights")
    if arr.shape != (size,):
        raise InvalidInput(f"expected {size} weights, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise InvalidInput("weights must be strictly positive and finite")
    return arr


def check_positive(value, name: str) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"{name} must be a real number") from exc
    if not math.isfinite(out) or out <= 0.0:
        raise InvalidInput(f"{name} must be positive and finite, got {value!r}")
    return out


def check_count(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or int(value) != value:
        raise InvalidInput(f"{name} must be an integer")
    value = int(value)
    if value < minimum:
        raise InvalidInput(f"{name} must be >= {minimum}, got {value}")
    return value


def check_lambda(value) -> complex:
    lam = complex(value)
    if not (cmath.isfinite(lam)):
        raise InadmissibleClassicality("classicality must be finite")
    if lam == 0:
        raise InadmissibleClassicality("classicality must be nonzero")
    if lam.real < 0:
        raise InadmissibleClassicality(
            f"classicality needs Re >= 0 for convergence, got {lam}")
    return lam


def principal_imag(z: complex) -> complex:
    """Shift ``z`` by a multiple of 2*pi*i so its imaginary part is in (-pi, pi]."""
    im = math.remainder(z.imag, 2.0 * math.pi)
    if im == -math.pi:
        im = math.pi
    return complex(z.real, im)


def log1p_complex(z):
    """Accurate ``log(1 + z)`` for complex arrays with small ``|z|``.

    numpy's complex log1p loses the real part near zero, which is exactly
    the regime finite-difference perturbations live in.
    """
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    re = 0.5 * np.log1p(x * (2.0 + x) + y * y)
    im = np.arctan2(y, 1.0 + x)
    return re + 1j * im
