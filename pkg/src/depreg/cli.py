"""Command-line entry point: ``depreg {simulate,fit,select,experiment,nile}``.

Exit codes: 0 success, 2 bad input, 3 numerical or pipeline failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .errors import DepregError, InputError, NumericalError
from .experiments import (
    config_from_mapping,
    make_process,
    parse_config_text,
    run_experiment,
    variance_exponent,
    write_report_csv,
)
from .methods import METHODS, MethodSpec, run_method
from .nile import load_series, nile_analysis, write_nile_report
from .partition import PartitionModel, empirical_contrast, fit_piecewise
from .processes import signal_grid

EXIT_INPUT = 2
EXIT_NUMERICAL = 3


def _write_series(values, path, header: str):
    lines = [f"# {header}"] + [f"{i},{v:.17g}" for i, v in enumerate(values, 1)]
    text = "\n".join(lines) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_simulate(args):
    process = make_process(args.process, args.hurst, args.sigma2, args.a)
    eps = process.simulate(args.n, args.seed)
    values = eps if args.noise_only else signal_grid(args.n) + eps
    header = (f"depreg simulate process={args.process} n={args.n} seed={args.seed}"
              f"{' noise-only' if args.noise_only else ''}")
    _write_series(values, args.out, header)
    return 0


def _emit(payload: dict, rows: list[list], columns: list[str], fmt: str, out):
    if fmt == "json":
        text = json.dumps(payload, indent=2) + "\n"
    else:
        body = [",".join(columns)] + [",".join(str(v) for v in row) for row in rows]
        meta = [f"# {k}={json.dumps(v)}" for k, v in payload.items() if not isinstance(v, list)]
        text = "\n".join(meta + body) + "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_fit(args):
    series = load_series(args.input)
    y = series.values
    fit = fit_piecewise(y, PartitionModel(y.size, args.m, args.degree))
    resid = y - fit.fitted
    payload = {
        "m": args.m,
        "degree": args.degree,
        "contrast": empirical_contrast(y, fit),
        "coefficients": fit.coefficients.tolist(),
        "fitted": fit.fitted.tolist(),
        "residuals": resid.tolist(),
    }
    rows = [[i + 1, f"{y[i]:.12g}", f"{fit.fitted[i]:.12g}", f"{resid[i]:.12g}"]
            for i in range(y.size)]
    _emit(payload, rows, ["index", "value", "fitted", "residual"], args.format, args.out)
    return 0


def cmd_select(args):
    series = load_series(args.input)
    y = series.values
    spec = MethodSpec(args.method, degree=args.degree, m_max=args.mmax, hurst=args.hurst)
    res = run_method(y, spec)
    payload = {
        "method": spec.label,
        "m_selected": res.m_selected,
        "kappa_dj": res.kappa_dj,
        "pre_model": res.pre_model,
        "H_estimates": res.H_estimates,
        "contrast": empirical_contrast(y, res.fit),
        "fitted": res.fit.fitted.tolist(),
        "residuals": res.residuals.tolist(),
    }
    rows = [[i + 1, f"{y[i]:.12g}", f"{res.fit.fitted[i]:.12g}", f"{res.residuals[i]:.12g}"]
            for i in range(y.size)]
    _emit(payload, rows, ["index", "value", "fitted", "residual"], args.format, args.out)
    return 0


def cmd_experiment(args):
    values = {}
    if args.config:
        try:
            values.update(parse_config_text(Path(args.config).read_text()))
        except OSError as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from exc
    overrides = {
        "process": args.process, "hurst": args.hurst, "sigma2": args.sigma2, "a": args.a,
        "n": args.n, "r": args.degree, "m_max": args.mmax, "methods": args.methods,
        "trials": args.trials, "base_seed": args.seed, "workers": args.workers,
    }
    aliases = {"r": "degree", "m_max": "mmax", "base_seed": "seed"}
    for key, value in overrides.items():
        if value is not None:
            values.pop(aliases.get(key, key), None)
            values[key] = str(value)
    config = config_from_mapping(values)
    report = run_experiment(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    risk_path, methods_path = write_report_csv(report, out / args.name)
    summary = {"oracle_m": report.oracle_m, "risk_csv": str(risk_path),
               "methods_csv": str(methods_path)}
    if args.window:
        lo, hi = args.window
        summary["variance_exponent"] = variance_exponent(report, lo, hi)
    for label, outc in report.per_method.items():
        ok = ~np.isnan(outc.risk)
        summary[label] = {
            "median_risk": float(np.median(outc.risk[ok])) if ok.any() else None,
            "failures": len(outc.errors),
        }
    summary["median_oracle_risk"] = float(np.median(report.trial_oracle_risk))
    print(json.dumps(summary, indent=2))
    return 0


NILE_ENV = "DEPREG_NILE_DATA"


def cmd_nile(args):
    data = args.data or os.environ.get(NILE_ENV)
    if not data:
        raise InputError(
            f"no data file given; the Nile minima series is not bundled, pass --data <path> "
            f"or set {NILE_ENV} (one value per line or year,value)"
        )
    series = load_series(data)
    report = nile_analysis(series, max_lag=args.max_lag)
    written = write_nile_report(report, args.out, fmt=args.format)
    summary = report.summary()
    summary["files"] = [str(p) for p in written]
    print(json.dumps(summary, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="depreg",
        description="Partition-size selection for regression with dependent errors.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def process_args(p, required):
        p.add_argument("--process", required=required, choices=["fgn", "arma21", "dmr", "white"])
        p.add_argument("--hurst", type=float)
        p.add_argument("--sigma2", type=float)
        p.add_argument("--a", type=float, help="DMR chain parameter")
        p.add_argument("--n", type=int, required=required)
        p.add_argument("--seed", type=int, default=None if not required else 0)

    p = sub.add_parser("simulate", help="write a simulated series")
    process_args(p, required=True)
    p.add_argument("--noise-only", action="store_true", help="omit the target signal")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="fit one partition size")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--degree", type=int, default=0)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("select", help="select a partition size with one method")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--method", choices=METHODS, default="whywhres")
    p.add_argument("--hurst", type=float, help="Hurst exponent for hgiven")
    p.add_argument("--degree", type=int, default=0)
    p.add_argument("--mmax", type=int)
    p.add_argument("--format", choices=["csv", "json"], default="json")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("experiment", help="Monte Carlo risk curves and method comparison")
    p.add_argument("--config")
    process_args(p, required=False)
    p.add_argument("--degree", type=int)
    p.add_argument("--mmax", type=int)
    p.add_argument("--methods", help="comma list, e.g. cdj,hgiven:0.7,why")
    p.add_argument("--trials", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--window", type=int, nargs=2, metavar=("M_LO", "M_HI"),
                   help="also report the risk-curve log-log slope on this window")
    p.add_argument("--name", default="report", help="file stem inside --out")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("nile", help="CDJ versus Wh(Y)+Wh(Res) on a series file")
    p.add_argument("--data", help=f"series file; defaults to ${NILE_ENV}")
    p.add_argument("--max-lag", type=int, default=40)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_nile)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"depreg: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"depreg: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except DepregError as exc:
        print(f"depreg: error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except BrokenPipeError:
        # reader closed early (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0


if __name__ == "__main__":
    sys.exit(main())
