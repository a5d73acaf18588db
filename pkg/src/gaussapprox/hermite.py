"""Hermite polynomials (probabilists' convention) and Gaussian moment identities.

Only the probabilists' normalization H_0 = 1, H_1 = x, H_{q+1} = x H_q - q H_{q-1}
is supported; the physicists' convention is deliberately unavailable to avoid
silent factor errors.  Evaluation always runs the three-term recurrence, never
a coefficient expansion.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["MAX_RANK", "hermite_eval", "hermite_variance", "hermite_cross_moment"]

#: Ranks above this overflow double-precision factorials; rejected explicitly.
MAX_RANK = 20


def _check_rank(q, minimum: int = 1) -> int:
    q = int(q)
    if q < minimum:
        raise ValueError(f"rank must be >= {minimum}, got {q}")
    if q > MAX_RANK:
        raise ValueError(f"rank {q} exceeds the supported maximum {MAX_RANK}")
    return q


def hermite_eval(q: int, x):
    """Evaluate H_q at x (scalar or array) by the three-term recurrence."""
    q = _check_rank(q, minimum=0)
    x = np.asarray(x, dtype=np.float64)
    h_prev = np.ones_like(x)
    if q == 0:
        return h_prev if x.ndim else float(h_prev)
    h = x.copy()
    for k in range(1, q):
        h, h_prev = x * h - k * h_prev, h
    return h if x.ndim else float(h)


def hermite_variance(q: int) -> float:
    """E[H_q(X)^2] = q! for X standard normal."""
    return float(math.factorial(_check_rank(q)))


def hermite_cross_moment(p: int, q: int, rho: float) -> float:
    """E[H_p(X) H_q(Y)] for jointly standard (X, Y) with correlation rho.

    Equals q! * rho^q when p == q and 0 otherwise.
    """
    p = _check_rank(p)
    q = _check_rank(q)
    if abs(rho) > 1.0:
        raise ValueError(f"correlation must lie in [-1, 1], got {rho}")
    if p != q:
        return 0.0
    return float(math.factorial(q)) * float(rho) ** q
