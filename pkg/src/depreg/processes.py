"""Seeded simulators for the error processes and the regression target.

Every draw goes through numpy's counter-based ``Philox`` bit generator, and
normal variates come from the inverse normal CDF of uniforms, so a path is a
pure function of ``(parameters, seed)`` and the number of underlying draws is
fixed.  Replicate seeds are derived with :func:`derive_seed`, which hashes
``(base_seed, index)`` through ``numpy.random.SeedSequence``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cholesky, toeplitz
from scipy.signal import lfilter
from scipy.special import ndtri

from .covariance import fgn_autocovariance
from .errors import InputError

ARMA_BURN_IN = 1000
DENSE_FALLBACK_CAP = 2**16


def rng_from_seed(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed) & 0xFFFFFFFFFFFFFFFF))


def derive_seed(base_seed: int, index: int) -> int:
    """64-bit seed for replicate ``index`` of an experiment seeded with ``base_seed``."""
    ss = np.random.SeedSequence([int(base_seed) & 0xFFFFFFFFFFFFFFFF, int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _uniforms(rng: np.random.Generator, size) -> np.ndarray:
    # shift off zero so the inverse CDF stays finite
    return rng.random(size) + 2.0**-54


def standard_normals(rng: np.random.Generator, size) -> np.ndarray:
    return ndtri(_uniforms(rng, size))


def simulate_arma21(n: int, seed: int) -> np.ndarray:
    """``e_i - 0.3 e_{i-1} - 0.1 e_{i-2} = W_i + 0.2 W_{i-1}`` with N(0, 1) innovations.

    Runs from zero initial conditions and drops the first 1000 values.
    """
    if n < 1:
        raise InputError("n must be >= 1")
    w = standard_normals(rng_from_seed(seed), n + ARMA_BURN_IN)
    return lfilter([1.0, 0.2], [1.0, -0.3, -0.1], w)[ARMA_BURN_IN:]


def simulate_fgn(n: int, H: float, sigma2: float = 1.0, seed: int = 0,
                 dense_cap: int = DENSE_FALLBACK_CAP) -> np.ndarray:
    """Exact fractional Gaussian noise sample by circulant embedding.

    Falls back to a Cholesky factor of the Toeplitz covariance when the
    embedding has an eigenvalue below ``-1e-10 * sigma2``.
    """
    if n < 1:
        raise InputError("n must be >= 1")
    gamma = fgn_autocovariance(H, sigma2, np.arange(n + 1))
    rng = rng_from_seed(seed)
    if n == 1:
        return math.sqrt(sigma2) * standard_normals(rng, 1)
    row = np.concatenate((gamma, gamma[n - 1:0:-1]))
    N = row.size
    eig = np.fft.fft(row).real
    if eig.min() < -1e-10 * sigma2:
        if n > dense_cap:
            raise InputError(f"n={n} exceeds the dense fallback cap {dense_cap}")
        L = cholesky(toeplitz(gamma[:n]), lower=True)
        return L @ standard_normals(rng, n)
    eig = np.clip(eig, 0.0, None)
    z = standard_normals(rng, 2 * N)
    w = (z[:N] + 1j * z[N:]) * np.sqrt(eig / N)
    return np.fft.fft(w).real[:n]


def simulate_dmr_chain(n: int, a: float, seed: int) -> np.ndarray:
    """Non-Gaussian Markov chain output ``Z_i**a - 0.5``.

    ``Z`` starts from its invariant law (density ``a x**(a-1)``); from state
    ``x`` it stays put with probability ``1 - x`` and otherwise redraws from
    the density ``(1 + a) x**a``.
    """
    if a <= 0:
        raise InputError(f"chain parameter a must be positive, got {a}")
    if n < 1:
        raise InputError("n must be >= 1")
    rng = rng_from_seed(seed)
    z0 = _uniforms(rng, 1)[0] ** (1.0 / a)
    moves = _uniforms(rng, n - 1)
    fresh = _uniforms(rng, n - 1) ** (1.0 / (1.0 + a))
    z = np.empty(n)
    z[0] = cur = z0
    for i in range(n - 1):
        if moves[i] < cur:
            cur = fresh[i]
        z[i + 1] = cur
    return z**a - 0.5


def target_signal(t):
    """``3 - 0.1 t + 0.5 t**2 - t**3 + sin(8 t)`` on ``[0, 1]``."""
    t = np.asarray(t, dtype=float)
    out = 3.0 - 0.1 * t + 0.5 * t**2 - t**3 + np.sin(8.0 * t)
    return float(out) if out.ndim == 0 else out


def signal_grid(n: int) -> np.ndarray:
    return target_signal(np.arange(1, n + 1) / n)


@dataclass(frozen=True)
class Arma21:
    name = "arma21"

    def simulate(self, n, seed):
        return simulate_arma21(n, seed)


@dataclass(frozen=True)
class Fgn:
    H: float
    sigma2: float = 1.0
    name = "fgn"

    def __post_init__(self):
        if not 0.0 < self.H < 1.0:
            raise InputError(f"Hurst exponent must lie in (0, 1), got {self.H}")
        if self.sigma2 <= 0:
            raise InputError("variance must be positive")

    def simulate(self, n, seed):
        return simulate_fgn(n, self.H, self.sigma2, seed)


@dataclass(frozen=True)
class DmrChain:
    a: float
    name = "dmr"

    def __post_init__(self):
        if self.a <= 0:
            raise InputError(f"chain parameter a must be positive, got {self.a}")

    def simulate(self, n, seed):
        return simulate_dmr_chain(n, self.a, seed)


@dataclass(frozen=True)
class WhiteNoise:
    sigma2: float = 1.0
    name = "white"

    def __post_init__(self):
        if self.sigma2 < 0:
            raise InputError("variance must be nonnegative")

    def simulate(self, n, seed):
        if self.sigma2 == 0:
            return np.zeros(n)
        return math.sqrt(self.sigma2) * standard_normals(rng_from_seed(seed), n)


def generate_observations(n: int, spec, seed: int) -> np.ndarray:
    """``Y_i = f*(i / n) + e_i`` for ``i = 1..n``."""
    return signal_grid(n) + spec.simulate(n, seed)
