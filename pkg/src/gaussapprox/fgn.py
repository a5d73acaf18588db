"""Fractional Gaussian noise: covariance structure and exact sampling.

Covers the stationary unit-step increments of fractional Brownian motion with
Hurst index H in (0, 1): the autocovariance ``rho``, the fBm covariance
kernel, exact sampling by circulant embedding (Cholesky fallback), and the
limiting standard deviation ``sigma_bm`` that normalizes the Hermite-functional
partial sums.

``rho(x) = (|x+1|^{2H} + |x-1|^{2H} - 2|x|^{2H}) / 2`` is a second difference
of ``|x|^{2H}`` and cancels catastrophically for large ``|x|`` in the direct
form, so beyond a fixed cutoff it is evaluated through the binomial series
``sum_j C(2H, 2j) |x|^{2H-2j}``, accurate to machine precision there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz
from scipy.special import binom

from .batch import write_binary_header
from .errors import HypothesisViolation
from .hermite import MAX_RANK
from .rng import standard_normals

__all__ = [
    "check_hurst",
    "rho",
    "fbm_covariance",
    "rho_asymptotic_constant",
    "FgnPath",
    "sample_fgn",
    "SigmaEstimate",
    "sigma_bm",
    "path_to_csv",
    "path_to_binary",
    "SIGMA_MAX_LAG",
]

_SERIES_CUTOFF = 16.0
_SERIES_TERMS = 10

#: Default truncation for the lag sum inside sigma_bm.
SIGMA_MAX_LAG = 1_000_000

#: Relative tolerance on the circulant embedding's negative eigenvalues.
EMBEDDING_RTOL = 1e-9


def check_hurst(h: float) -> float:
    h = float(h)
    if not 0.0 < h < 1.0:
        raise ValueError(f"Hurst index must lie in (0, 1), got {h}")
    return h


def rho(h: float, x) -> np.ndarray | float:
    """Autocovariance of unit-step fBm increments at (real) lag x."""
    h = check_hurst(h)
    x = np.asarray(x, dtype=np.float64)
    scalar = x.ndim == 0
    ax = np.atleast_1d(np.abs(x))
    out = np.empty_like(ax)

    near = ax <= _SERIES_CUTOFF
    a = ax[near]
    out[near] = 0.5 * ((a + 1.0) ** (2 * h) + np.abs(a - 1.0) ** (2 * h) - 2.0 * a ** (2 * h))

    far = ~near
    if np.any(far):
        a = ax[far]
        acc = np.zeros_like(a)
        for j in range(1, _SERIES_TERMS + 1):
            acc += binom(2.0 * h, 2 * j) * a ** (2.0 * h - 2 * j)
        out[far] = acc

    return float(out[0]) if scalar else out.reshape(x.shape)


def fbm_covariance(h: float, s: float, t: float) -> float:
    """E[B_s B_t] = (t^{2H} + s^{2H} - |t-s|^{2H}) / 2."""
    h = check_hurst(h)
    if s < 0 or t < 0:
        raise ValueError("times must be nonnegative")
    return 0.5 * (t ** (2 * h) + s ** (2 * h) - abs(t - s) ** (2 * h))


def rho_asymptotic_constant(h: float) -> float:
    """Signed constant c with rho(x) ~ c * |x|^(2H-2); zero at H = 1/2."""
    h = check_hurst(h)
    return h * (2.0 * h - 1.0)


@dataclass(frozen=True)
class FgnPath:
    """Jointly Gaussian unit-step increments with covariance rho(i - j)."""

    hurst: float
    increments: np.ndarray
    seed: int
    method: str  # "circulant" or "cholesky"

    @property
    def n(self) -> int:
        return self.increments.shape[0]


def _embedding_eigenvalues(h: float, n: int) -> np.ndarray:
    """FFT eigenvalues of the circulant extension of rho(0..n-1).

    Embedding size is the first power of two >= 2n.
    """
    size = 1 << max(1, 2 * n - 1).bit_length()
    half = size // 2
    head = rho(h, np.arange(half + 1))
    row = np.concatenate([head, head[-2:0:-1]])
    return np.fft.fft(row).real


def sample_fgn(h: float, n: int, seed: int, method: str | None = None) -> FgnPath:
    """Exact fGn sample of length n, reproducible for fixed (H, n, seed).

    Primary method is circulant embedding; if the embedding spectrum dips
    below -1e-9 relative to its maximum (never expected for fGn, kept as a
    guard) the sampler falls back to Cholesky of the n x n Toeplitz covariance.
    ``method`` forces "circulant" or "cholesky" explicitly.
    """
    h = check_hurst(h)
    n = int(n)
    if n < 1:
        raise ValueError("path length must be >= 1")
    if method not in (None, "circulant", "cholesky"):
        raise ValueError(f"unknown method {method!r}")

    lam = None
    if method != "cholesky":
        lam = _embedding_eigenvalues(h, n)
        lam_max = float(np.max(lam))
        embeddable = float(np.min(lam)) >= -EMBEDDING_RTOL * lam_max
        if method == "circulant" and not embeddable:
            raise ValueError("circulant embedding is not nonnegative definite")
    if method == "cholesky" or (method is None and not embeddable):
        cov = toeplitz(rho(h, np.arange(n)))
        ell = np.linalg.cholesky(cov)
        values = ell @ standard_normals(seed, n)
        return FgnPath(hurst=h, increments=values, seed=seed, method="cholesky")

    lam = np.clip(lam, 0.0, None)
    size = lam.size
    half = size // 2
    z = standard_normals(seed, size)
    spectrum = np.zeros(size, dtype=np.complex128)
    spectrum[0] = np.sqrt(lam[0]) * z[0]
    spectrum[half] = np.sqrt(lam[half]) * z[1]
    re = z[2 : half + 1]
    im = z[half + 1 : size]
    spectrum[1:half] = np.sqrt(lam[1:half] / 2.0) * (re + 1j * im)
    spectrum[half + 1 :] = np.conj(spectrum[1:half][::-1])
    values = (np.fft.fft(spectrum) / np.sqrt(size)).real[:n]
    return FgnPath(hurst=h, increments=values, seed=seed, method="circulant")


@dataclass(frozen=True)
class SigmaEstimate:
    """Limiting standard deviation sqrt(q! * sum_r rho(r)^q) with diagnostics.

    ``value`` folds the analytic tail estimate for lags beyond ``lags`` into
    the truncated sum; ``partial_sum`` and ``tail_estimate`` report the two
    pieces of ``sum_r rho(r)^q`` separately.
    """

    value: float
    hurst: float
    rank: int
    lags: int
    partial_sum: float
    tail_estimate: float

    def __float__(self) -> float:
        return self.value


def check_breuer_major_hypothesis(h: float, q: int) -> None:
    """Require H < 1 - 1/(2q), i.e. summability of rho^q."""
    if not h < 1.0 - 1.0 / (2 * q):
        raise HypothesisViolation(
            f"H={h} violates H < 1 - 1/(2q) = {1.0 - 1.0 / (2 * q)} for q={q}"
        )


def _tail_estimate(h: float, q: int, lag: int) -> float:
    """Signed integral estimate of sum_{|r| > lag} rho(r)^q from the asymptotic."""
    alpha = q * (2.0 * h - 2.0)
    c = rho_asymptotic_constant(h) ** q
    return 2.0 * c * (lag + 0.5) ** (alpha + 1.0) / (-(alpha + 1.0))


def sigma_bm(h: float, q: int, max_lag: int = SIGMA_MAX_LAG, tail_rtol: float = 1e-10) -> SigmaEstimate:
    """Breuer-Major normalization sigma = sqrt(q! * sum_{r in Z} rho(r)^q).

    The lag sum is truncated at ``max_lag`` or earlier once the asymptotic
    tail estimate drops below ``tail_rtol`` of the partial sum, whichever
    comes first; the tail estimate itself is added to the returned value
    (and reported separately), pinning the result to near machine precision
    for admissible (H, q) at the default truncation.
    """
    h = check_hurst(h)
    q = int(q)
    if not 2 <= q <= MAX_RANK:
        raise ValueError(f"rank must be in [2, {MAX_RANK}], got {q}")
    check_breuer_major_hypothesis(h, q)

    total = rho(h, 0.0) ** q  # = 1
    lag = 0
    chunk = 1 << 14
    while lag < max_lag:
        upper = min(lag + chunk, max_lag)
        r = np.arange(lag + 1, upper + 1, dtype=np.float64)
        total += 2.0 * float(np.sum(rho(h, r) ** q))
        lag = upper
        chunk = min(2 * chunk, 1 << 19)
        if abs(_tail_estimate(h, q, lag)) <= tail_rtol * abs(total):
            break

    tail = _tail_estimate(h, q, lag)
    corrected = total + tail
    if corrected <= 0.0:
        raise ValueError("nonpositive variance sum; inadmissible configuration")
    return SigmaEstimate(
        value=float(np.sqrt(math.factorial(q) * corrected)),
        hurst=h,
        rank=q,
        lags=lag,
        partial_sum=float(total),
        tail_estimate=float(tail),
    )


def path_to_csv(path: FgnPath, fileobj) -> None:
    """One increment per line."""
    for x in path.increments:
        fileobj.write(repr(float(x)) + "\n")


def path_to_binary(path: FgnPath, fileobj) -> None:
    """Little-endian stream: header (magic, H, n, seed) then float64 increments."""
    write_binary_header(fileobj, path.hurst, path.n, path.seed)
    fileobj.write(path.increments.astype("<f8").tobytes())
