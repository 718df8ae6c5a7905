"""Piecewise-polynomial least squares on regular partitions of {1, ..., n}.

Cell ``j`` (1-based) of the regular partition of size ``m`` holds the indices
``i`` with ``(j - 1) / m < i / n <= j / m``.  Within a cell the design uses the
local monomials ``1, t, ..., t**r`` where ``t = 1, ..., len(cell)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InputError, NumericalError


def cell_bounds(n: int, m: int) -> list[tuple[int, int]]:
    """Return the 1-based inclusive ``(start, end)`` of every cell."""
    if not 1 <= m <= n:
        raise InputError(f"invalid partition: need 1 <= m <= n, got m={m}, n={n}")
    j = np.arange(m + 1)
    edges = (j * n) // m
    return [(int(edges[k]) + 1, int(edges[k + 1])) for k in range(m)]


def _cell_edges(n: int, m: int) -> np.ndarray:
    # 0-based half-open edges: cell k is [edges[k], edges[k+1])
    return (np.arange(m + 1) * n) // m


@dataclass(frozen=True)
class PartitionModel:
    """Regular partition of ``n`` points into ``m`` cells, degree ``r``."""

    n: int
    m: int
    r: int = 0

    def __post_init__(self):
        if self.r < 0:
            raise InputError(f"degree must be >= 0, got {self.r}")
        if not 1 <= self.m <= self.n:
            raise InputError(
                f"invalid partition: need 1 <= m <= n, got m={self.m}, n={self.n}"
            )
        if self.n // self.m < self.r + 1:
            raise InputError(
                f"partition m={self.m} of n={self.n} has cells shorter than "
                f"r+1={self.r + 1}"
            )

    @property
    def dim(self) -> int:
        return (self.r + 1) * self.m

    @property
    def edges(self) -> np.ndarray:
        return _cell_edges(self.n, self.m)

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.edges)

    def bounds(self) -> list[tuple[int, int]]:
        return cell_bounds(self.n, self.m)

    def length_groups(self):
        """Yield ``(length, starts)`` with 0-based starts of all cells of that length.

        A regular partition has at most two distinct cell lengths, which is what
        makes the blockwise computations cheap.
        """
        edges = self.edges
        lengths = np.diff(edges)
        for length in np.unique(lengths):
            yield int(length), edges[:-1][lengths == length]

    def design(self) -> np.ndarray:
        """Explicit ``n x (r+1)m`` design matrix (small problems and tests only)."""
        X = np.zeros((self.n, self.dim))
        for k, (a, b) in enumerate(zip(self.edges[:-1], self.edges[1:])):
            t = np.arange(1, b - a + 1, dtype=float)
            X[a:b, k * (self.r + 1):(k + 1) * (self.r + 1)] = np.vander(
                t, self.r + 1, increasing=True
            )
        return X


def max_cells(n: int, r: int) -> int:
    """Default upper end of the model collection: five points per parameter, at most 200."""
    return max(1, min(200, n // ((r + 1) * 5)))


@lru_cache(maxsize=4096)
def _local_basis(length: int, r: int):
    """Orthonormal basis of degree-``r`` polynomials on ``t = 1..length``.

    Returns ``(Q, R, scale)`` where ``V / scale = Q R`` for the local Vandermonde
    ``V``.  Columns are scaled by ``length**k`` before the QR for conditioning.
    """
    t = np.arange(1, length + 1, dtype=float)
    scale = float(length) ** np.arange(r + 1)
    V = np.vander(t, r + 1, increasing=True) / scale
    Q, R = np.linalg.qr(V)
    diag = np.abs(np.diag(R))
    if diag.min() <= 1e-12 * diag.max():
        raise NumericalError(f"rank-deficient local design (length={length}, r={r})")
    Q.setflags(write=False)
    R.setflags(write=False)
    return Q, R, scale


def local_projection(length: int, r: int) -> np.ndarray:
    """The ``length x length`` projector onto degree-``r`` polynomials."""
    Q, _, _ = _local_basis(length, r)
    return Q @ Q.T


@dataclass(frozen=True)
class PiecewiseFit:
    model: PartitionModel
    coefficients: np.ndarray  # shape (m, r+1), local monomial basis
    fitted: np.ndarray

    def cell_values(self, j: int) -> np.ndarray:
        """Evaluate cell ``j`` (1-based) polynomial at its local abscissae."""
        a, b = self.model.edges[j - 1], self.model.edges[j]
        t = np.arange(1, b - a + 1, dtype=float)
        return np.vander(t, self.model.r + 1, increasing=True) @ self.coefficients[j - 1]


def fit_piecewise(y, model: PartitionModel) -> PiecewiseFit:
    """Least-squares fit of ``y`` on the piecewise polynomials of ``model``.

    The cells have disjoint supports, so the projection decouples into one small
    regression per cell; cells of equal length share the same local basis and
    are solved together.
    """
    y = np.asarray(y, dtype=float)
    if y.shape != (model.n,):
        raise InputError(f"expected a vector of length {model.n}, got shape {y.shape}")
    r = model.r
    fitted = np.empty_like(y)
    coefficients = np.empty((model.m, r + 1))
    cell_index = np.arange(model.m)
    lengths = model.lengths
    for length, starts in model.length_groups():
        try:
            Q, R, scale = _local_basis(length, r)
        except NumericalError as exc:
            bad = int(cell_index[lengths == length][0]) + 1
            raise NumericalError(f"cell {bad}: {exc}") from exc
        idx = starts[:, None] + np.arange(length)
        block = y[idx]
        proj = block @ Q
        fitted[idx] = proj @ Q.T
        scaled = np.linalg.solve(R, proj.T).T
        coefficients[lengths == length] = scaled / scale
    return PiecewiseFit(model=model, coefficients=coefficients, fitted=fitted)


def empirical_contrast(y, fit: PiecewiseFit) -> float:
    """Normalized residual sum of squares ``||y - fitted||_n^2``."""
    y = np.asarray(y, dtype=float)
    if y.shape != fit.fitted.shape:
        raise InputError("length mismatch between y and fit")
    return float(np.mean((y - fit.fitted) ** 2))


def _regressogram_fitted(y: np.ndarray, m: int) -> np.ndarray:
    n = y.size
    edges = _cell_edges(n, m)
    csum = np.concatenate(([0.0], np.cumsum(y)))
    means = (csum[edges[1:]] - csum[edges[:-1]]) / np.diff(edges)
    return np.repeat(means, np.diff(edges))


def fitted_curve(y, r: int, m_max: int) -> np.ndarray:
    """Fitted vectors for every ``m = 1..m_max`` stacked as rows."""
    y = np.asarray(y, dtype=float)
    n = y.size
    if m_max < 1 or m_max * (r + 1) > n:
        raise InputError(f"m_max={m_max} invalid for n={n}, r={r}")
    out = np.empty((m_max, n))
    for m in range(1, m_max + 1):
        if r == 0:
            out[m - 1] = _regressogram_fitted(y, m)
        else:
            out[m - 1] = fit_piecewise(y, PartitionModel(n, m, r)).fitted
    return out


def contrast_curve(y, r: int, m_max: int) -> np.ndarray:
    """Empirical contrast for ``m = 1..m_max`` (entry ``m - 1``)."""
    y = np.asarray(y, dtype=float)
    return np.mean((y[None, :] - fitted_curve(y, r, m_max)) ** 2, axis=1)
