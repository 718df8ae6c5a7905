"""Penalty functions for partition-size selection.

Two families live here: the parametric shapes calibrated by the slope
heuristic (:class:`Dimension`, :class:`PowerGamma`, :class:`PowerGammaPlusLog`),
and the fully specified penalties that need the error covariance
(:func:`theoretical_penalty`, :func:`rho_penalty`, wrapped by
:class:`TraceExact`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .covariance import CovarianceModel, spectral_radius, trace_projection
from .errors import InputError
from .partition import PartitionModel


@dataclass(frozen=True)
class ModelWeights:
    """Prior weights ``pi_m`` over the collection ``m = 1..m_max``."""

    pi: np.ndarray

    def __post_init__(self):
        pi = np.asarray(self.pi, dtype=float)
        if pi.ndim != 1 or pi.size == 0 or np.any(pi <= 0):
            raise InputError("weights must be a non-empty positive vector")
        if abs(pi.sum() - 1.0) > 1e-10:
            raise InputError(f"weights must sum to 1, got {pi.sum()}")
        pi.setflags(write=False)
        object.__setattr__(self, "pi", pi)

    @property
    def m_max(self) -> int:
        return self.pi.size

    def __getitem__(self, m: int) -> float:
        if not 1 <= m <= self.pi.size:
            raise InputError(f"m={m} outside the weighted collection 1..{self.pi.size}")
        return float(self.pi[m - 1])


def default_weights(m_max: int) -> ModelWeights:
    """Weights proportional to ``m**-2``, normalized over ``1..m_max``."""
    if m_max < 1:
        raise InputError("m_max must be >= 1")
    w = 1.0 / np.arange(1, m_max + 1, dtype=float) ** 2
    return ModelWeights(w / w.sum())


def uniform_weights(m_max: int) -> ModelWeights:
    return ModelWeights(np.full(m_max, 1.0 / m_max))


@dataclass(frozen=True)
class Dimension:
    """``d_m / n`` with ``d_m = (r + 1) m``."""

    r: int = 0

    def value(self, m, n):
        return (self.r + 1) * np.asarray(m, dtype=float) / n


@dataclass(frozen=True)
class PowerGamma:
    """``(d_m / n) ** gamma``; concave for long memory, convex for anti-persistence."""

    gamma: float
    r: int = 0

    def __post_init__(self):
        if not 0.0 < self.gamma < 2.0:
            raise InputError(f"gamma must lie in (0, 2), got {self.gamma}")

    def value(self, m, n):
        return ((self.r + 1) * np.asarray(m, dtype=float) / n) ** self.gamma


@dataclass(frozen=True)
class PowerGammaPlusLog:
    """``(m / n) ** gamma + log(max(m, 2)) / n`` for anti-persistent regressograms."""

    gamma: float

    def __post_init__(self):
        if not 1.0 < self.gamma < 2.0:
            raise InputError(f"gamma must lie in (1, 2), got {self.gamma}")

    def value(self, m, n):
        m = np.asarray(m, dtype=float)
        return (m / n) ** self.gamma + np.log(np.maximum(m, 2.0)) / n


@dataclass(frozen=True)
class TraceExact:
    """The covariance-aware penalty of :func:`theoretical_penalty` as a shape."""

    cov: CovarianceModel
    K: float
    weights: ModelWeights
    r: int = 0

    def value(self, m, n):
        if n != self.cov.n:
            raise InputError(f"shape built for n={self.cov.n}, asked for n={n}")
        rho = spectral_radius(self.cov)
        ms = np.atleast_1d(np.asarray(m, dtype=int))
        out = np.array([
            theoretical_penalty(int(k), PartitionModel(n, int(k), self.r), self.K,
                                self.cov, self.weights, rho=rho)
            for k in ms
        ])
        return out if np.ndim(m) else float(out[0])


def shape_value(shape, m, n):
    """Evaluate ``shape`` at partition size(s) ``m`` for sample size ``n``."""
    if np.any(np.asarray(m) < 1):
        raise InputError("partition size must be >= 1")
    v = shape.value(m, n)
    return float(v) if np.ndim(v) == 0 else v


def theoretical_penalty(
    m: int,
    model: PartitionModel,
    K: float,
    cov: CovarianceModel,
    weights: ModelWeights,
    rho: float | None = None,
) -> float:
    """Penalty guaranteeing the oracle inequality for a known covariance.

    ``(K / n) * (sqrt(tr(P_m Sigma) + rho) + sqrt(rho) * sqrt(2 log(1 / pi_m)))**2``

    Pass ``rho`` to reuse a spectral radius across many ``m``.
    """
    if K <= 1:
        raise InputError(f"K must exceed 1, got {K}")
    if model.m != m:
        raise InputError(f"model has m={model.m}, asked for m={m}")
    if rho is None:
        rho = spectral_radius(cov)
    tr = trace_projection(cov, model)
    root = math.sqrt(tr + rho) + math.sqrt(rho) * math.sqrt(2.0 * math.log(1.0 / weights[m]))
    return K / model.n * root**2


def rho_penalty(m: int, model: PartitionModel, K: float, rho: float, weights: ModelWeights) -> float:
    """Spectral-radius penalty ``K rho / n (sqrt(d_m) + sqrt(2 log(1/pi_m)))**2``."""
    if K <= 1:
        raise InputError(f"K must exceed 1, got {K}")
    if rho <= 0:
        raise InputError(f"spectral radius must be positive, got {rho}")
    if model.m != m:
        raise InputError(f"model has m={model.m}, asked for m={m}")
    root = math.sqrt(model.dim) + math.sqrt(2.0 * math.log(1.0 / weights[m]))
    return K * rho / model.n * root**2
