"""Central finite differences used by the Stein and Chatterjee modules."""

from __future__ import annotations

import numpy as np

__all__ = ["fd_gradient", "fd_hessian"]


def fd_gradient(f, x, h: float) -> np.ndarray:
    """Central-difference gradient of a scalar function, one step per axis."""
    if h <= 0:
        raise ValueError("step must be positive")
    x = np.asarray(x, dtype=np.float64)
    grad = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        e = np.zeros_like(x)
        e[i] = h
        grad[i] = (f(x + e) - f(x - e)) / (2.0 * h)
    return grad


def fd_hessian(f, x, h: float) -> np.ndarray:
    """Central-difference Hessian (symmetric 4-point stencil off-diagonal)."""
    if h <= 0:
        raise ValueError("step must be positive")
    x = np.asarray(x, dtype=np.float64)
    d = x.shape[0]
    hess = np.empty((d, d))
    f0 = f(x)
    for i in range(d):
        ei = np.zeros_like(x)
        ei[i] = h
        hess[i, i] = (f(x + ei) - 2.0 * f0 + f(x - ei)) / (h * h)
        for j in range(i + 1, d):
            ej = np.zeros_like(x)
            ej[j] = h
            val = (
                f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)
            ) / (4.0 * h * h)
            hess[i, j] = hess[j, i] = val
    return hess
