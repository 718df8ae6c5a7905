"""End-to-end selection strategies combining shapes, Whittle estimates and the dimension jump.

``cdj``       dimension-proportional shape
``hgiven``    shape ``(d_m/n)**(2 - 2H)`` with ``H`` supplied
``why``       same shape with ``H`` estimated on the observations
``cdjwhres``  ``cdj`` pre-model, ``H`` estimated on its residuals
``whywhres``  ``why`` pre-model, ``H`` re-estimated on its residuals
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, NumericalError, PipelineError
from .hurst import whittle_estimate
from .partition import PartitionModel, PiecewiseFit, contrast_curve, fit_piecewise, max_cells
from .penalties import Dimension, PowerGamma
from .selection import dimension_jump, regularization_path

METHODS = ("cdj", "hgiven", "why", "cdjwhres", "whywhres")
H_CLAMP = (0.05, 0.95)


@dataclass(frozen=True)
class MethodSpec:
    kind: str
    degree: int = 0
    m_max: int | None = None
    hurst: float | None = None

    def __post_init__(self):
        if self.kind not in METHODS:
            raise InputError(f"unknown method {self.kind!r}; choose from {', '.join(METHODS)}")
        if self.kind == "hgiven":
            if self.hurst is None or not 0.0 < self.hurst < 1.0:
                raise InputError("hgiven needs a Hurst exponent in (0, 1)")
        if self.degree < 0:
            raise InputError("degree must be >= 0")

    @classmethod
    def parse(cls, text: str, degree: int = 0, m_max: int | None = None) -> "MethodSpec":
        """Parse ``cdj``, ``why``, ``hgiven:0.7`` and the like."""
        kind, _, arg = text.strip().lower().partition(":")
        hurst = float(arg) if arg else None
        return cls(kind, degree=degree, m_max=m_max, hurst=hurst)

    @property
    def label(self) -> str:
        return {
            "cdj": "CDJ",
            "hgiven": f"HGiven({self.hurst:g})" if self.hurst is not None else "HGiven",
            "why": "Wh(Y)",
            "cdjwhres": "CDJ+Wh(Res)",
            "whywhres": "Wh(Y)+Wh(Res)",
        }[self.kind]


@dataclass
class MethodResult:
    m_selected: int
    kappa_dj: float
    H_estimates: list[float]
    fit: PiecewiseFit
    residuals: np.ndarray
    pre_model: int | None = None
    spec: MethodSpec | None = field(default=None, repr=False)


def _clamp(H: float) -> float:
    return min(max(H, H_CLAMP[0]), H_CLAMP[1])


def _power_shape(H: float, r: int) -> PowerGamma:
    return PowerGamma(2.0 - 2.0 * _clamp(H), r=r)


def _jump(contrasts, shape, n, r, stage):
    ms = np.arange(1, contrasts.size + 1)
    try:
        path = regularization_path(contrasts, shape.value(ms, n))
        return dimension_jump(path, (r + 1) * ms)
    except NumericalError as exc:
        raise PipelineError(stage, exc) from exc


def _whittle(x, stage):
    try:
        return whittle_estimate(x).H_hat
    except (NumericalError, InputError) as exc:
        raise PipelineError(stage, exc) from exc


def run_method(y, spec: MethodSpec, contrasts=None) -> MethodResult:
    """Select a partition size for ``y`` with the strategy named by ``spec``.

    ``contrasts`` may carry a precomputed contrast curve for ``m = 1..m_max``.
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    r = spec.degree
    m_max = spec.m_max if spec.m_max is not None else max_cells(n, r)
    if contrasts is None:
        contrasts = contrast_curve(y, r, m_max)
    contrasts = np.asarray(contrasts, dtype=float)
    if contrasts.size != m_max:
        raise InputError(f"contrast curve has {contrasts.size} entries, m_max is {m_max}")

    H_estimates: list[float] = []
    pre_model = None
    if spec.kind == "cdj":
        dj = _jump(contrasts, Dimension(r), n, r, "dimension jump")
    elif spec.kind == "hgiven":
        dj = _jump(contrasts, _power_shape(spec.hurst, r), n, r, "dimension jump")
    elif spec.kind == "why":
        H1 = _whittle(y, "Whittle on Y")
        H_estimates.append(H1)
        dj = _jump(contrasts, _power_shape(H1, r), n, r, "dimension jump")
    else:
        if spec.kind == "cdjwhres":
            pre = _jump(contrasts, Dimension(r), n, r, "pre-model dimension jump")
        else:
            H1 = _whittle(y, "Whittle on Y")
            H_estimates.append(H1)
            pre = _jump(contrasts, _power_shape(H1, r), n, r, "pre-model dimension jump")
        pre_model = pre.m_selected
        resid = y - fit_piecewise(y, PartitionModel(n, pre_model, r)).fitted
        H2 = _whittle(resid, "Whittle on residuals")
        H_estimates.append(H2)
        dj = _jump(contrasts, _power_shape(H2, r), n, r, "final dimension jump")

    fit = fit_piecewise(y, PartitionModel(n, dj.m_selected, r))
    return MethodResult(
        m_selected=dj.m_selected,
        kappa_dj=dj.kappa_dj,
        H_estimates=H_estimates,
        fit=fit,
        residuals=y - fit.fitted,
        pre_model=pre_model,
        spec=spec,
    )
