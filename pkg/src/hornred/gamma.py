"""Complex log-gamma by the Lanczos approximation (double precision).

Uses the 15-term Godfrey coefficient set with g = 607/128, with the
reflection formula for Re(z) < 1/2. Works elementwise on numpy arrays.
"""

from __future__ import annotations

import numpy as np

G = 607 / 128
_COEF = np.array(
    [
        0.999999999999997092,
        57.1562356658629235,
        -59.5979603554754912,
        14.1360979747417471,
        -0.491913816097620199,
        0.339946499848118887e-4,
        0.465236289270485756e-4,
        -0.983744753048795646e-4,
        0.158088703224912494e-3,
        -0.210264441724104883e-3,
        0.217439618115212643e-3,
        -0.164318106536763890e-3,
        0.844182239838527433e-4,
        -0.261908384015814087e-4,
        0.368991826595316234e-5,
    ]
)
_LOG_SQRT_2PI = 0.5 * np.log(2 * np.pi)


def _lanczos_log(z: np.ndarray) -> np.ndarray:
    # valid for Re(z) >= 1/2
    ser = np.full(z.shape, _COEF[0], dtype=complex)
    for j, c in enumerate(_COEF[1:], start=1):
        ser = ser + c / (z + j)
    t = z + G + 0.5
    return _LOG_SQRT_2PI + (z + 0.5) * np.log(t) - t + np.log(ser / z)


def loggamma(z):
    """log Gamma(z) for complex z (any branch; only exp() of it is branch-free).

    Raises ZeroDivisionError at the poles z = 0, -1, -2, ...
    """
    arr = np.asarray(z, dtype=complex)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if np.any(is_pole(arr)):
        raise ZeroDivisionError(f"Gamma pole at {arr[is_pole(arr)][0]}")
    out = np.empty(arr.shape, dtype=complex)
    left = arr.real < 0.5
    right = ~left
    if np.any(right):
        out[right] = _lanczos_log(arr[right])
    if np.any(left):
        w = arr[left]
        out[left] = np.log(np.pi) - np.log(np.sin(np.pi * w)) - _lanczos_log(1 - w)
    return out[0] if scalar else out


def gamma(z):
    return np.exp(loggamma(z))


def rgamma(z):
    """1/Gamma(z), zero at the poles."""
    arr = np.atleast_1d(np.asarray(z, dtype=complex))
    poles = is_pole(arr)
    out = np.zeros(arr.shape, dtype=complex)
    if np.any(~poles):
        out[~poles] = np.exp(-loggamma(arr[~poles]))
    return out[0] if np.ndim(z) == 0 else out


def is_pole(z, tol: float = 1e-12):
    z = np.asarray(z, dtype=complex)
    near = np.abs(z - np.round(z.real))
    return (z.real < 0.5) & (near <= tol * np.maximum(1.0, np.abs(z)))
