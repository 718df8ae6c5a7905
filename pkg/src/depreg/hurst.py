"""Whittle estimation of the Hurst exponent of fractional Gaussian noise."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericalError

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Periodogram:
    frequencies: np.ndarray
    ordinates: np.ndarray


def periodogram(x) -> Periodogram:
    """Mean-corrected periodogram at the Fourier frequencies ``2 pi j / n``, ``1 <= j <= (n-1)/2``.

    ``I(lambda_j) = |sum_t (x_t - mean) exp(-i t lambda_j)|**2 / (2 pi n)``.  The
    Nyquist frequency is left out for even ``n``.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < 8:
        raise InputError(f"periodogram needs at least 8 observations, got {n}")
    M = (n - 1) // 2
    z = np.fft.rfft(x - x.mean())[1:M + 1]
    ordinates = (z.real**2 + z.imag**2) / (2.0 * math.pi * n)
    freqs = 2.0 * math.pi * np.arange(1, M + 1) / n
    return Periodogram(frequencies=freqs, ordinates=ordinates)


def fgn_spectral_density(H: float, lam, n_alias: int = 100):
    """Unit-scale spectral density of fractional Gaussian noise.

    ``2 (1 - cos lam) sum_j |lam + 2 pi j|**(-2H-1)``, summed over
    ``|j| <= n_alias`` with the remaining tails replaced by their integrals
    (midpoint rule).  Equal to 1 everywhere at ``H = 0.5``.
    """
    if not 0.0 < H < 1.0:
        raise InputError(f"Hurst exponent must lie in (0, 1), got {H}")
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= 0) or np.any(lam > math.pi * (1 + 1e-12)):
        raise InputError("frequencies must lie in (0, pi]")
    d = 2.0 * H + 1.0
    j = np.arange(-n_alias, n_alias + 1, dtype=float)
    two_pi = 2.0 * math.pi
    core = np.sum(np.abs(lam[..., None] + two_pi * j) ** (-d), axis=-1)
    edge = two_pi * (n_alias + 0.5)
    tail = ((edge + lam) ** (1.0 - d) + (edge - lam) ** (1.0 - d)) / (two_pi * (d - 1.0))
    # 1 - cos(lam) = 2 sin(lam/2)**2 avoids cancellation near zero
    out = 4.0 * np.sin(0.5 * lam) ** 2 * (core + tail)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class WhittleFit:
    H_hat: float
    objective_value: float
    scale_hat: float
    bracket: tuple[float, float]
    boundary: bool


def _golden_section(f, a: float, b: float, tol: float):
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def whittle_estimate(
    x,
    bounds: tuple[float, float] = (0.01, 0.99),
    tol: float = 1e-4,
    n_alias: int = 100,
) -> WhittleFit:
    """Whittle estimate of ``H`` with the innovation scale profiled out.

    Minimizes ``log(mean(I / g_H)) + mean(log g_H)`` over ``H`` in ``bounds``.
    A five-point scan picks the starting bracket, which golden-section search
    then shrinks to width ``tol``.
    """
    x = np.asarray(x, dtype=float)
    if x.size < 64:
        raise InputError(f"Whittle estimation needs at least 64 observations, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise InputError("series contains non-finite values")
    sd = x.std()
    if sd == 0.0:
        raise NumericalError("all periodogram ordinates are zero (constant series)")
    pg = periodogram((x - x.mean()) / sd)
    if not np.any(pg.ordinates > 0):
        raise NumericalError("all periodogram ordinates are zero (constant series)")
    lam, I = pg.frequencies, pg.ordinates

    def objective(H):
        g = fgn_spectral_density(H, lam, n_alias)
        return math.log(np.mean(I / g)) + float(np.mean(np.log(g)))

    lo, hi = bounds
    grid = np.linspace(lo, hi, 5)
    values = [objective(h) for h in grid]
    k = int(np.argmin(values))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, 4)]
    H_hat, fmin = _golden_section(objective, a, b, tol)
    g = fgn_spectral_density(H_hat, lam, n_alias)
    scale = float(np.mean(I / g)) * sd**2
    boundary = H_hat - lo < 2 * tol or hi - H_hat < 2 * tol
    return WhittleFit(H_hat=float(H_hat), objective_value=float(fmin), scale_hat=scale,
                      bracket=(float(a), float(b)), boundary=bool(boundary))


def sample_acf(x, max_lag: int) -> np.ndarray:
    """Sample autocorrelations at lags ``0..max_lag`` (mean-corrected, biased normalization)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if not 0 <= max_lag < n:
        raise InputError(f"max_lag must lie in [0, n), got {max_lag} for n={n}")
    z = x - x.mean()
    denom = float(z @ z)
    if denom == 0.0:
        raise NumericalError("zero-variance series has no autocorrelation")
    return np.array([z[: n - k] @ z[k:] for k in range(max_lag + 1)]) / denom
