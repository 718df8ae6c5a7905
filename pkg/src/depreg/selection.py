"""Penalized model choice and dimension-jump calibration of the penalty constant."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericalError


class DimensionJumpError(NumericalError):
    pass


def select_min(contrasts, penalties) -> int:
    """1-based index minimizing ``contrast + penalty``; ties go to the smallest ``m``."""
    c = np.asarray(contrasts, dtype=float)
    p = np.asarray(penalties, dtype=float)
    if c.shape != p.shape or c.ndim != 1:
        raise InputError("contrasts and penalties must be vectors of equal length")
    if c.size == 0:
        raise InputError("empty model collection")
    return int(np.argmin(c + p)) + 1


@dataclass(frozen=True)
class SelectionPath:
    """Exact piecewise-constant map ``kappa -> m_hat(kappa)``.

    ``chosen[b]`` (1-based model index) is the minimizer on
    ``[breakpoints[b], breakpoints[b+1])``; the last interval is unbounded.
    """

    breakpoints: np.ndarray
    chosen: np.ndarray
    contrasts: np.ndarray
    shapes: np.ndarray

    def model_at(self, kappa: float) -> int:
        if kappa < 0:
            raise InputError("kappa must be nonnegative")
        b = int(np.searchsorted(self.breakpoints, kappa, side="right")) - 1
        return int(self.chosen[b])

    def __len__(self):
        return self.chosen.size


def regularization_path(contrasts, shapes) -> SelectionPath:
    """Walk the lower convex hull of ``(shape, contrast)`` as ``kappa`` grows.

    From the current minimizer, the next breakpoint is the smallest
    ``(c_k - c_cur) / (s_cur - s_k)`` over models with a smaller shape; the
    model taking over there is the one with the smallest shape among those
    reaching it (it wins for every larger ``kappa``).  Identical points keep
    the smaller ``m``.
    """
    c = np.asarray(contrasts, dtype=float)
    s = np.asarray(shapes, dtype=float)
    if c.shape != s.shape or c.ndim != 1:
        raise InputError("contrasts and shapes must be vectors of equal length")
    if c.size == 0:
        raise InputError("empty model collection")
    if np.any(s <= 0):
        raise InputError("penalty shapes must be strictly positive")

    # just above kappa = 0: smallest contrast, then smallest shape, then smallest m
    order = np.lexsort((np.arange(c.size), s, c))
    cur = int(order[0])
    kappas = [0.0]
    chosen = [cur]
    while True:
        cand = np.flatnonzero(s < s[cur])
        if cand.size == 0:
            break
        slopes = (c[cand] - c[cur]) / (s[cur] - s[cand])
        k_next = max(float(slopes.min()), kappas[-1])
        hit = cand[slopes <= k_next + 1e-13 * abs(k_next)]
        # among simultaneous takeovers the smallest shape wins beyond the breakpoint
        nxt = int(hit[np.lexsort((hit, c[hit], s[hit]))[0]])
        if k_next == kappas[-1]:
            chosen[-1] = nxt
        else:
            kappas.append(k_next)
            chosen.append(nxt)
        cur = nxt
    return SelectionPath(
        breakpoints=np.array(kappas),
        chosen=np.array(chosen) + 1,
        contrasts=c,
        shapes=s,
    )


@dataclass(frozen=True)
class DimensionJumpResult:
    kappa_dj: float
    m_selected: int
    path: SelectionPath
    jump: float


def dimension_jump(path: SelectionPath, dims) -> DimensionJumpResult:
    """Locate the largest drop of ``d_{m_hat(kappa)}`` and select at twice that ``kappa``.

    Equal drops resolve to the largest ``kappa``.
    """
    dims = np.asarray(dims, dtype=float)
    if len(path) == 0:
        raise InputError("empty selection path")
    if len(path) == 1:
        raise DimensionJumpError("no dimension jump; collection too poor")
    d = dims[path.chosen - 1]
    drops = d[:-1] - d[1:]
    best = drops.max()
    if best <= 0:
        raise DimensionJumpError("no dimension jump; collection too poor")
    b = int(np.flatnonzero(drops == best)[-1]) + 1
    kappa = float(path.breakpoints[b])
    return DimensionJumpResult(
        kappa_dj=kappa, m_selected=path.model_at(2.0 * kappa), path=path, jump=float(best)
    )
