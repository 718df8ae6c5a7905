"""Series files and the two-method trend analysis used for the Nile minima."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError, NumericalError, PipelineError
from .hurst import sample_acf, whittle_estimate
from .methods import MethodResult, MethodSpec, run_method
from .partition import max_cells


@dataclass(frozen=True)
class SeriesFile:
    values: np.ndarray
    years: np.ndarray | None = None

    def __len__(self):
        return self.values.size


def load_series(path, min_length: int = 8) -> SeriesFile:
    """Read one value per line, or ``year,value`` pairs.  ``#`` lines are skipped.

    A first line that does not parse is taken as a header only if it is the
    very first non-comment line and contains letters.
    """
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    values, years = [], []
    seen_data = False
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(",")]
        try:
            if len(fields) == 1:
                v, yr = float(fields[0]), None
            elif len(fields) == 2:
                yr, v = float(fields[0]), float(fields[1])
            else:
                raise ValueError(f"expected 1 or 2 columns, got {len(fields)}")
        except ValueError as exc:
            if not seen_data and any(c.isalpha() for c in line):
                seen_data = True
                continue
            raise InputError(f"{path}:{lineno}: cannot parse {line!r} ({exc})") from None
        if not math.isfinite(v):
            raise InputError(f"{path}:{lineno}: non-finite value")
        seen_data = True
        values.append(v)
        years.append(yr)
    if len(values) < min_length:
        raise InputError(f"{path}: need at least {min_length} values, got {len(values)}")
    has_years = all(y is not None for y in years)
    if not has_years and any(y is not None for y in years):
        raise InputError(f"{path}: mixed one- and two-column lines")
    return SeriesFile(
        values=np.array(values),
        years=np.array(years) if has_years else None,
    )


@dataclass
class NileReport:
    results: dict[str, MethodResult]
    acf: dict[str, np.ndarray]
    series: SeriesFile

    def summary(self) -> dict:
        out = {"n": len(self.series), "methods": {}}
        for label, res in self.results.items():
            out["methods"][label] = {
                "m_selected": res.m_selected,
                "kappa_dj": res.kappa_dj,
                "pre_model": res.pre_model,
                "H_estimates": res.H_estimates,
                "residual_H": res.H_estimates[-1],
            }
        return out


def nile_analysis(series: SeriesFile, max_lag: int = 40) -> NileReport:
    """Fit regressograms selected by CDJ and Wh(Y)+Wh(Res) and describe their residuals.

    For CDJ the residual Hurst exponent is estimated afterwards, since the
    method itself does not use one.
    """
    y = series.values
    n = y.size
    if n < 64:
        raise InputError(f"series too short for the analysis: {n} < 64")
    m_max = max_cells(n, 0)
    results, acfs = {}, {}
    # Wh(Y)+Wh(Res) first: a degenerate series should fail in its Whittle stage
    for spec in (MethodSpec("whywhres", 0, m_max), MethodSpec("cdj", 0, m_max)):
        res = run_method(y, spec)
        if spec.kind == "cdj":
            try:
                res.H_estimates = [whittle_estimate(res.residuals).H_hat]
            except NumericalError as exc:
                raise PipelineError("Whittle on CDJ residuals", exc) from exc
        results[spec.label] = res
        acfs[spec.label] = sample_acf(res.residuals, min(max_lag, n - 1))
    order = ["CDJ", "Wh(Y)+Wh(Res)"]
    return NileReport(
        results={k: results[k] for k in order},
        acf={k: acfs[k] for k in order},
        series=series,
    )


def write_nile_report(report: NileReport, out_dir, fmt: str = "csv") -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    summary = out_dir / "summary.json"
    summary.write_text(json.dumps(report.summary(), indent=2) + "\n")
    written.append(summary)
    y = report.series.values
    index = report.series.years if report.series.years is not None else np.arange(1, y.size + 1)
    labels = list(report.results)
    if fmt == "json":
        fits = out_dir / "fits.json"
        fits.write_text(json.dumps({
            "index": index.tolist(),
            "value": y.tolist(),
            **{lab: {"fitted": report.results[lab].fit.fitted.tolist(),
                     "residual": report.results[lab].residuals.tolist(),
                     "acf": report.acf[lab].tolist()} for lab in labels},
        }) + "\n")
        written.append(fits)
        return written
    fits = out_dir / "fits.csv"
    with open(fits, "w") as fh:
        cols = ["index", "value"] + [f"{k}_{lab}" for lab in labels for k in ("fitted", "residual")]
        fh.write(",".join(cols) + "\n")
        for i in range(y.size):
            row = [f"{index[i]:.12g}", f"{y[i]:.12g}"]
            for lab in labels:
                res = report.results[lab]
                row += [f"{res.fit.fitted[i]:.12g}", f"{res.residuals[i]:.12g}"]
            fh.write(",".join(row) + "\n")
    acf = out_dir / "acf.csv"
    with open(acf, "w") as fh:
        fh.write(",".join(["lag"] + labels) + "\n")
        for k in range(report.acf[labels[0]].size):
            fh.write(",".join([str(k)] + [f"{report.acf[lab][k]:.12g}" for lab in labels]) + "\n")
    written += [fits, acf]
    return written
