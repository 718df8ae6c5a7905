"""Error covariance structures and the penalty ingredients built from them.

A :class:`CovarianceModel` is either a dense symmetric matrix or a stationary
autocovariance sequence viewed as an implicit Toeplitz matrix.  The trace
``tr(P_m Sigma)`` of a partition projector against the covariance is computed
blockwise, since the projector is block diagonal over the cells.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import toeplitz

from .errors import InputError, NumericalError
from .partition import PartitionModel, local_projection


def fgn_autocovariance(H: float, sigma2: float, k):
    """Autocovariance of fractional Gaussian noise at lag(s) ``k``."""
    if not 0.0 < H < 1.0:
        raise InputError(f"Hurst exponent must lie in (0, 1), got {H}")
    if sigma2 <= 0:
        raise InputError(f"variance must be positive, got {sigma2}")
    k = np.abs(np.asarray(k, dtype=float))
    two_h = 2.0 * H
    out = 0.5 * sigma2 * (
        np.abs(k + 1.0) ** two_h - 2.0 * k**two_h + np.abs(k - 1.0) ** two_h
    )
    out = np.where(k == 0, sigma2, out)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class AutocovarianceSequence:
    """``gamma[k]`` is the covariance at lag ``k`` for ``k = 0..len(gamma)-1``."""

    gamma: np.ndarray
    tag: str = "empirical"

    def __post_init__(self):
        g = np.asarray(self.gamma, dtype=float)
        if g.ndim != 1 or g.size == 0:
            raise InputError("autocovariance sequence must be a non-empty vector")
        if not g[0] > 0:
            raise InputError("gamma(0) must be positive")
        if np.any(np.abs(g) > g[0] * (1 + 1e-12)):
            raise InputError("|gamma(k)| exceeds gamma(0)")
        g.setflags(write=False)
        object.__setattr__(self, "gamma", g)

    @classmethod
    def fgn(cls, H: float, sigma2: float, max_lag: int) -> "AutocovarianceSequence":
        return cls(fgn_autocovariance(H, sigma2, np.arange(max_lag + 1)), tag=f"FGN(H={H}, sigma2={sigma2})")

    @classmethod
    def white(cls, sigma2: float, max_lag: int) -> "AutocovarianceSequence":
        g = np.zeros(max_lag + 1)
        g[0] = sigma2
        return cls(g, tag=f"white(sigma2={sigma2})")

    @property
    def max_lag(self) -> int:
        return self.gamma.size - 1

    def check_psd(self, n: int = 64) -> float:
        """Smallest eigenvalue of the ``n x n`` Toeplitz section (sampled PSD check)."""
        n = min(n, self.gamma.size)
        lam = float(np.linalg.eigvalsh(toeplitz(self.gamma[:n]))[0])
        if lam < -1e-8 * self.gamma[0]:
            raise InputError(f"autocovariance is not positive semidefinite (eigenvalue {lam:.3e})")
        return lam


@dataclass(frozen=True)
class CovarianceModel:
    """Covariance of an error vector of length ``n``.

    Build with :meth:`dense` or :meth:`toeplitz`; exactly one of ``matrix`` and
    ``acv`` is set.
    """

    n: int
    matrix: np.ndarray | None = None
    acv: AutocovarianceSequence | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def dense(cls, matrix) -> "CovarianceModel":
        S = np.array(matrix, dtype=float)
        if S.ndim != 2 or S.shape[0] != S.shape[1]:
            raise InputError("covariance matrix must be square")
        if not np.allclose(S, S.T, rtol=1e-12, atol=1e-14 * max(1.0, np.abs(S).max())):
            raise InputError("covariance matrix must be symmetric")
        S.setflags(write=False)
        return cls(n=S.shape[0], matrix=S)

    @classmethod
    def toeplitz(cls, acv: AutocovarianceSequence, n: int) -> "CovarianceModel":
        if acv.max_lag < n - 1:
            raise InputError(f"need lags up to {n - 1}, sequence stops at {acv.max_lag}")
        return cls(n=n, acv=acv)

    @classmethod
    def fgn(cls, H: float, sigma2: float, n: int) -> "CovarianceModel":
        return cls.toeplitz(AutocovarianceSequence.fgn(H, sigma2, n - 1), n)

    @property
    def is_toeplitz(self) -> bool:
        return self.acv is not None

    def to_dense(self) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix
        return toeplitz(self.acv.gamma[: self.n])

    def block(self, start: int, length: int) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix[start:start + length, start:start + length]
        return toeplitz(self.acv.gamma[:length])

    def matvec(self, v: np.ndarray) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix @ v
        # Toeplitz product through a 2n circulant embedding
        n = self.n
        if "eig" not in self._cache:
            g = self.acv.gamma[:n]
            c = np.concatenate((g, [0.0], g[:0:-1]))
            self._cache["eig"] = np.fft.rfft(c)
        w = np.fft.irfft(self._cache["eig"] * np.fft.rfft(v, 2 * n), 2 * n)
        return w[:n]


def partial_sum_variance(acv: AutocovarianceSequence, n: int) -> float:
    """``Var(eps_1 + ... + eps_n) = n gamma(0) + 2 sum_k (n - k) gamma(k)``."""
    if n < 1:
        raise InputError("n must be >= 1")
    if acv.max_lag < n - 1:
        raise InputError(f"need lags up to {n - 1}, sequence stops at {acv.max_lag}")
    g = acv.gamma[:n]
    k = np.arange(1, n)
    return float(n * g[0] + 2.0 * np.dot(n - k, g[1:]))


def _block_sums_dense(cov: CovarianceModel, edges: np.ndarray) -> np.ndarray:
    # summed-area table gives every diagonal block sum in O(1); built once per covariance
    A = cov._cache.get("sat")
    if A is None:
        S = cov.matrix
        A = np.zeros((S.shape[0] + 1, S.shape[1] + 1))
        A[1:, 1:] = S.cumsum(0).cumsum(1)
        cov._cache["sat"] = A
    a, b = edges[:-1], edges[1:]
    return A[b, b] - A[a, b] - A[b, a] + A[a, a]


def trace_projection(cov: CovarianceModel, model: PartitionModel) -> float:
    """Exact ``tr(P_m Sigma)`` for the piecewise-polynomial projector of ``model``.

    For ``r = 0`` each cell contributes ``(sum of its covariance block) / length``;
    on a Toeplitz covariance that block sum is the partial-sum variance of the
    cell length, so nothing is materialized.
    """
    if cov.n != model.n:
        raise InputError(f"covariance has size {cov.n}, model has n={model.n}")
    if model.r == 0:
        if cov.is_toeplitz:
            total = 0.0
            for length, starts in model.length_groups():
                total += starts.size * partial_sum_variance(cov.acv, length) / length
            return total
        lengths = model.lengths
        return float(np.sum(_block_sums_dense(cov, model.edges) / lengths))

    total = 0.0
    for length, starts in model.length_groups():
        P = local_projection(length, model.r)
        if cov.is_toeplitz:
            total += starts.size * float(np.sum(P * cov.block(0, length)))
        else:
            idx = starts[:, None] + np.arange(length)
            blocks = cov.matrix[idx[:, :, None], idx[:, None, :]]
            total += float(np.einsum("ab,kab->", P, blocks))
    return total


def spectral_radius(cov: CovarianceModel, tol: float = 1e-8, max_iter: int = 100_000) -> float:
    """Largest eigenvalue of a symmetric PSD covariance by power iteration.

    Starts from the all-ones vector.  Stops once the eigen-residual
    ``||Sigma v - rho v||`` falls below ``tol * rho``.
    """
    n = cov.n
    v = np.ones(n) / np.sqrt(n)
    w = cov.matvec(v)
    if np.linalg.norm(w) == 0.0:
        # all-ones lies in the null space; restart from a fixed pseudo-random vector
        v = np.random.default_rng(0x5EED).standard_normal(n)
        v /= np.linalg.norm(v)
        w = cov.matvec(v)
        if np.linalg.norm(w) == 0.0:
            return 0.0
    rho = float(v @ w)
    for _ in range(max_iter):
        rho = float(v @ w)
        resid = np.linalg.norm(w - rho * v)
        if resid <= tol * abs(rho):
            return rho
        v = w / np.linalg.norm(w)
        w = cov.matvec(v)
    raise NumericalError(
        f"power iteration did not converge in {max_iter} iterations "
        f"(last Rayleigh quotient {rho:.12g})"
    )
