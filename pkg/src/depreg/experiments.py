"""Monte Carlo risk curves and method comparisons.

Each trial draws ``Y = f* + eps`` with a seed derived from ``(base_seed,
trial)``, fits every partition size, records the true risk
``||f* - f_m||_n^2`` and runs each method.  Trials may run in worker
processes; results are reduced in trial order, so output does not depend on
the worker count.
"""

from __future__ import annotations

import csv
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DepregError, InputError
from .methods import MethodSpec, run_method
from .partition import fitted_curve, max_cells
from .processes import Arma21, DmrChain, Fgn, WhiteNoise, derive_seed, signal_grid

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExperimentConfig:
    process: object
    n: int
    r: int = 0
    m_max: int | None = None
    methods: tuple[MethodSpec, ...] = ()
    trials: int = 100
    base_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise InputError("trials must be >= 1")
        if self.n < 2:
            raise InputError("n must be >= 2")
        m_max = self.m_max if self.m_max is not None else max_cells(self.n, self.r)
        if m_max < 1 or m_max * (self.r + 1) > self.n:
            raise InputError(f"m_max={m_max} invalid for n={self.n}, r={self.r}")
        object.__setattr__(self, "m_max", m_max)
        methods = tuple(
            MethodSpec(s.kind, degree=self.r, m_max=m_max, hurst=s.hurst) for s in self.methods
        )
        object.__setattr__(self, "methods", methods)


@dataclass
class MethodOutcomes:
    label: str
    m_selected: np.ndarray  # float, NaN where the trial failed
    risk: np.ndarray
    H1: np.ndarray
    H2: np.ndarray
    errors: dict = field(default_factory=dict)


@dataclass
class RiskReport:
    ms: np.ndarray
    per_m_risk: np.ndarray
    bias: np.ndarray
    oracle_m: int
    trial_risk: np.ndarray  # (trials, m_max)
    per_method: dict[str, MethodOutcomes]

    @property
    def trial_oracle_risk(self) -> np.ndarray:
        return self.trial_risk.min(axis=1)


def _run_trial(config: ExperimentConfig, trial: int):
    n = config.n
    f = signal_grid(n)
    y = f + config.process.simulate(n, derive_seed(config.base_seed, trial))
    fits = fitted_curve(y, config.r, config.m_max)
    risk = np.mean((fits - f) ** 2, axis=1)
    contrasts = np.mean((fits - y) ** 2, axis=1)
    outcomes = []
    for spec in config.methods:
        try:
            res = run_method(y, spec, contrasts=contrasts)
        except DepregError as exc:
            outcomes.append((None, str(exc)))
            continue
        H = res.H_estimates + [np.nan] * (2 - len(res.H_estimates))
        outcomes.append(((res.m_selected, risk[res.m_selected - 1], H[0], H[1]), None))
    return risk, outcomes


def run_experiment(config: ExperimentConfig) -> RiskReport:
    trials = range(config.trials)
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_run_trial, [config] * config.trials, trials))
    else:
        results = [_run_trial(config, t) for t in trials]

    trial_risk = np.stack([r for r, _ in results])
    per_m = trial_risk.mean(axis=0)
    f = signal_grid(config.n)
    bias = np.mean((fitted_curve(f, config.r, config.m_max) - f) ** 2, axis=1)

    per_method = {}
    for k, spec in enumerate(config.methods):
        rows = np.full((config.trials, 4), np.nan)
        errors = {}
        for t, (_, outcomes) in enumerate(results):
            values, err = outcomes[k]
            if err is None:
                rows[t] = values
            else:
                errors[t] = err
        if len(errors) == config.trials:
            raise DepregError(f"method {spec.label} failed in every trial: {errors[0]}")
        if errors:
            log.warning("%s failed in %d of %d trials", spec.label, len(errors), config.trials)
        per_method[spec.label] = MethodOutcomes(
            spec.label, rows[:, 0], rows[:, 1], rows[:, 2], rows[:, 3], errors
        )
    ms = np.arange(1, config.m_max + 1)
    return RiskReport(
        ms=ms,
        per_m_risk=per_m,
        bias=bias,
        oracle_m=int(np.argmin(per_m)) + 1,
        trial_risk=trial_risk,
        per_method=per_method,
    )


def variance_exponent(report: RiskReport, m_lo: int, m_hi: int) -> float:
    """Least-squares slope of ``log(mean risk)`` against ``log(m)`` for ``m_lo <= m <= m_hi``."""
    if not 1 <= m_lo < m_hi <= report.ms[-1]:
        raise InputError(f"window [{m_lo}, {m_hi}] outside 1..{report.ms[-1]}")
    sel = (report.ms >= m_lo) & (report.ms <= m_hi)
    risk = report.per_m_risk[sel]
    if np.any(risk <= 0):
        raise InputError("nonpositive risk inside the window")
    return float(np.polyfit(np.log(report.ms[sel]), np.log(risk), 1)[0])


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and np.isnan(x)):
        return ""
    return f"{x:.12g}"


def write_report_csv(report: RiskReport, path) -> tuple[Path, Path]:
    """Write ``<path>.risk.csv`` and ``<path>.methods.csv``; return both paths."""
    base = os.fspath(path)
    risk_path = Path(base + ".risk.csv")
    methods_path = Path(base + ".methods.csv")
    try:
        with open(risk_path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["m", "mean_risk"])
            for m, v in zip(report.ms, report.per_m_risk):
                w.writerow([int(m), _fmt(float(v))])
        with open(methods_path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["method", "trial", "m_selected", "risk", "H1", "H2"])
            for label, out in report.per_method.items():
                for t in range(out.m_selected.size):
                    m = out.m_selected[t]
                    w.writerow([
                        label,
                        t,
                        "" if np.isnan(m) else int(m),
                        _fmt(float(out.risk[t])),
                        _fmt(float(out.H1[t])),
                        _fmt(float(out.H2[t])),
                    ])
    except OSError as exc:
        raise InputError(f"cannot write report at {base}: {exc}") from exc
    return risk_path, methods_path


def read_risk_csv(path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0].astype(int), data[:, 1]


PROCESS_KEYS = {"arma21", "fgn", "dmr", "white"}


def make_process(name: str, hurst=None, sigma2=None, a=None):
    name = name.lower()
    if name == "arma21":
        return Arma21()
    if name == "fgn":
        if hurst is None:
            raise InputError("fgn process needs a Hurst exponent")
        return Fgn(float(hurst), 1.0 if sigma2 is None else float(sigma2))
    if name == "dmr":
        if a is None:
            raise InputError("dmr process needs parameter a")
        return DmrChain(float(a))
    if name == "white":
        return WhiteNoise(1.0 if sigma2 is None else float(sigma2))
    raise InputError(f"unknown process {name!r}; choose from {', '.join(sorted(PROCESS_KEYS))}")


def parse_config_text(text: str) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            key, sep, value = line.partition(":")
        if not sep or not key.strip():
            raise InputError(f"config line {lineno}: expected key = value")
        out[key.strip().lower()] = value.strip()
    return out


def config_from_mapping(values: dict) -> ExperimentConfig:
    """Build a config from flat string keys (file contents and/or CLI overrides)."""
    known = {"process", "hurst", "sigma2", "a", "n", "r", "degree", "m_max", "mmax",
             "methods", "trials", "base_seed", "seed", "workers"}
    unknown = set(values) - known
    if unknown:
        raise InputError(f"unknown config keys: {', '.join(sorted(unknown))}")
    try:
        process = make_process(values.get("process", "white"), values.get("hurst"),
                               values.get("sigma2"), values.get("a"))
        r = int(values.get("r", values.get("degree", 0)))
        m_max = values.get("m_max", values.get("mmax"))
        methods = tuple(
            MethodSpec.parse(s, degree=r)
            for s in str(values.get("methods", "")).split(",") if s.strip()
        )
        return ExperimentConfig(
            process=process,
            n=int(values["n"]),
            r=r,
            m_max=int(m_max) if m_max not in (None, "") else None,
            methods=methods,
            trials=int(values.get("trials", 100)),
            base_seed=int(values.get("base_seed", values.get("seed", 0))),
            workers=int(values.get("workers", 1)),
        )
    except KeyError as exc:
        raise InputError(f"missing config key {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"bad config value: {exc}") from exc


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    return config_from_mapping(parse_config_text(text))
