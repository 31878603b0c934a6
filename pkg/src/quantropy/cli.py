"""Command-line interface.

Exit codes: 0 success, 1 verification failed, 2 bad config or input,
3 numerical failure. Machine output goes to ``--out`` (or stdout); all
diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import itertools
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import freeparticle as fp
from .ensemble import Classicality, HistorySpace, report
from .exceptions import InvalidInput, NoConvergence, QuantropyError
from .io import (
    LIMIT_COLUMNS,
    SWEEP_COLUMNS,
    dumps,
    load_model,
    report_dict,
    sweep_row,
    thermal_dict,
    to_csv,
)
from .oscillatory import RegulatorSpec, regularize
from .thermo import analogy_gaps, boltzmann_report
from .verification import resolve_tolerances, run_suites

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
GRID_NAMES = ("hbar", "n", "beta")


class ConfigError(Exception):
    pass


def _complex_arg(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected 're' or 're,im', got {text!r}")


def _tol_arg(text: str):
    name, sep, value = text.partition("=")
    try:
        if not sep:
            raise ValueError
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}") from None


def parse_grid(spec: str):
    """``name=v1,v2,...`` | ``name=a:b`` (integers, inclusive) | ``name=log:a:b:k``."""
    name, sep, body = spec.partition("=")
    name = name.strip()
    if not sep or name not in GRID_NAMES:
        raise ConfigError(f"grid must look like <{'|'.join(GRID_NAMES)}>=values, got {spec!r}")
    body = body.strip()
    try:
        if body.startswith("log:"):
            _, a, b, k = body.split(":")
            values = list(np.logspace(math.log10(float(a)), math.log10(float(b)), int(k)))
        elif ":" in body:
            a, b = body.split(":")
            values = list(range(int(a), int(b) + 1))
        elif body:
            values = [float(v) for v in body.split(",")]
        else:
            values = []
    except ValueError as exc:
        raise ConfigError(f"cannot parse grid {spec!r}: {exc}") from exc
    if not values:
        raise ConfigError(f"grid {spec!r} is empty")
    if not all(math.isfinite(float(v)) for v in values):
        raise ConfigError(f"grid {spec!r} has non-finite values")
    diffs = np.diff(np.asarray(values, dtype=float))
    if len(values) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
        raise ConfigError(f"grid {spec!r} must be strictly monotone")
    if name == "n":
        if any(float(v) != int(v) or int(v) < 1 for v in values):
            raise ConfigError("n grid needs positive integers")
        values = [int(v) for v in values]
    elif any(float(v) <= 0 for v in values):
        raise ConfigError(f"{name} grid needs positive values")
    return name, values


def _model(args):
    if args.model is None:
        return fp.FreeParticleModel()
    try:
        return load_model(args.model)
    except OSError as exc:
        raise ConfigError(f"cannot read model: {exc}") from exc
    except InvalidInput as exc:
        raise ConfigError(str(exc)) from exc


def _classicality(args, model) -> Classicality:
    given = [x is not None for x in (args.hbar, args.lam, args.beta)]
    if sum(given) > 1:
        raise ConfigError("give at most one of --hbar, --lambda, --beta")
    try:
        if args.lam is not None:
            return Classicality(args.lam)
        if args.beta is not None:
            if args.beta <= 0:
                raise ConfigError("--beta must be positive")
            return Classicality(complex(args.beta))
        if args.hbar is not None:
            return Classicality.from_hbar(args.hbar)
    except InvalidInput as exc:
        raise ConfigError(str(exc)) from exc
    if isinstance(model, fp.FreeParticleModel):
        return model.classicality
    return Classicality.from_hbar(1.0)


def _emit(args, text: str):
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _model_report(model, lam: Classicality):
    if isinstance(model, fp.FreeParticleModel):
        return fp.closed_report(model, lam)
    return report(model, lam)


def run_report(args) -> int:
    model = _model(args)
    lam = _classicality(args, model)
    rep = _model_report(model, lam)
    thermal = None
    if lam.is_real and lam.lam.real > 0:
        beta = lam.lam.real
        if isinstance(model, HistorySpace):
            thermal = thermal_dict(boltzmann_report(model, beta))
        else:
            thermal = {k: (v.real if isinstance(v, complex) else v)
                       for k, v in zip(("log_Z", "expected_energy", "entropy", "free_energy"),
                                       rep.as_tuple())}
            thermal["beta"] = beta
    if args.format == "csv":
        n = model.n if isinstance(model, fp.FreeParticleModel) else None
        _emit(args, to_csv([sweep_row(n, lam.hbar, lam.lam, rep)], SWEEP_COLUMNS))
    else:
        out = {"command": "report", "model": model, "lambda": lam.lam, "hbar": lam.hbar,
               "report": report_dict(rep), "thermal": thermal}
        _emit(args, dumps(out))
    return EXIT_OK


def run_verify(args) -> int:
    try:
        overrides = dict(args.tol or [])
        resolve_tolerances(overrides)
    except KeyError as exc:
        raise ConfigError(str(exc.args[0])) from exc
    seed = 42 if args.seed is None else args.seed
    result = run_suites(seed, overrides, perturb=args.perturb)
    _emit(args, dumps(result))
    if not result["passed"]:
        print(f"verification failed: {', '.join(result['failed'])}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _sweep_point(model, point: dict):
    n = point.get("n")
    hbar = point.get("hbar")
    beta = point.get("beta")
    try:
        if isinstance(model, fp.FreeParticleModel):
            m = replace(model, **{k: v for k, v in (("n", n), ("hbar", hbar)) if v is not None})
            lam = Classicality(complex(beta)) if beta is not None else m.classicality
            rep = fp.closed_report(m, None if beta is None else lam)
            row = sweep_row(m.n, None if beta is not None else m.hbar, lam.lam, rep)
        else:
            lam = (Classicality(complex(beta)) if beta is not None
                   else Classicality.from_hbar(hbar if hbar is not None else 1.0))
            rep = report(model, lam)
            row = sweep_row(None, lam.hbar, lam.lam, rep)
        row["error"] = ""
    except QuantropyError as exc:
        lam_val = complex(beta) if beta is not None else (1.0 / (1j * hbar) if hbar else complex("nan"))
        row = sweep_row(n, hbar, lam_val)
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def run_sweep(args) -> int:
    if not args.grid:
        raise ConfigError("sweep needs at least one --grid")
    grids = [parse_grid(g) for g in args.grid]
    names = [g[0] for g in grids]
    if len(set(names)) != len(names):
        raise ConfigError("each grid name may appear once")
    if "hbar" in names and "beta" in names:
        raise ConfigError("hbar and beta grids are exclusive")
    model = _model(args)
    if "n" in names and not isinstance(model, fp.FreeParticleModel):
        raise ConfigError("an n grid needs a free-particle model")
    points = [dict(zip(names, combo)) for combo in itertools.product(*(g[1] for g in grids))]
    with ThreadPoolExecutor() as pool:
        rows = list(pool.map(lambda p: _sweep_point(model, p), points))
    if args.format == "json":
        _emit(args, dumps(rows))
    else:
        _emit(args, to_csv(rows, SWEEP_COLUMNS + ["error"]))
    return EXIT_OK


def run_limit(args) -> int:
    alpha = args.alpha if args.alpha is not None else 1j
    try:
        reg = RegulatorSpec(kind=args.regulator, cutoff_M=args.M, epsilon=args.epsilon,
                            extrapolation_levels=args.levels,
                            tol=dict(args.tol or []).get("regulator"))
    except InvalidInput as exc:
        raise ConfigError(str(exc)) from exc
    result = regularize(alpha, reg, strict=False)
    rows = [{"level": r.level, "regulator": r.regulator, "estimate_re": r.estimate.real,
             "estimate_im": r.estimate.imag, "abs_error_vs_closed_form": r.abs_error}
            for r in result.levels]
    if args.format == "json":
        _emit(args, dumps({"alpha": alpha, "regulator": reg.kind, "levels": rows,
                           "extrapolated": result.value, "error_estimate": result.error_estimate}))
    else:
        _emit(args, to_csv(rows, LIMIT_COLUMNS))
    if not result.error_estimate <= reg.tol:
        raise NoConvergence(f"{reg.kind} regularization moved by {result.error_estimate:.3e} "
                            f"> tol {reg.tol:.1e}")
    return EXIT_OK


def run_analogy(args) -> int:
    model = _model(args)
    beta = 1.0 if args.beta is None else args.beta
    if beta <= 0:
        raise ConfigError("--beta must be positive")
    tol = dict(args.tol or []).get("analogy")
    lam = Classicality(complex(beta))
    if isinstance(model, HistorySpace):
        tol = 1e-10 if tol is None else tol
        gaps = analogy_gaps(model, beta)
        quantum = report(model, lam)
        thermal = boltzmann_report(model, beta)
    else:
        # thermal side: real Gaussian sum on a velocity grid, scaled by n
        tol = 1e-8 if tol is None else tol
        quantum = fp.closed_report(model, lam)
        res = fp.quadrature_report(replace(model, n=1), lam)
        axis = fp.axis_space(model, res.grid_half_width, res.grid_points)
        one = boltzmann_report(axis, beta)
        thermal = type(one)(*(model.n * v for v in one.as_tuple()), beta=beta)
        gaps = {k: abs(q - t) for k, q, t in zip(("log_Z", "expected", "entropy", "free"),
                                                 quantum.as_tuple(), thermal.as_tuple())}
    agree = all(g <= tol for g in gaps.values())
    _emit(args, dumps({"command": "analogy", "beta": beta, "quantum": report_dict(quantum),
                       "thermal": thermal_dict(thermal), "gaps": gaps, "tolerance": tol,
                       "agree": agree}))
    return EXIT_OK if agree else EXIT_FAIL


COMMANDS = {
    "report": run_report,
    "verify": run_verify,
    "sweep": run_sweep,
    "limit": run_limit,
    "analogy": run_analogy,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", help="path to model JSON, or inline JSON")
    common.add_argument("--hbar", type=float)
    common.add_argument("--lambda", dest="lam", type=_complex_arg, metavar="RE,IM")
    common.add_argument("--beta", type=float)
    common.add_argument("--grid", action="append", help="e.g. hbar=1,0.1 or n=1:16 or hbar=log:1e-4:1:9")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--seed", type=int)
    common.add_argument("--tol", action="append", type=_tol_arg, metavar="NAME=VAL")

    parser = argparse.ArgumentParser(prog="quantropy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("report", parents=[common], help="ensemble report for a model")
    v = sub.add_parser("verify", parents=[common], help="run the property suites")
    v.add_argument("--perturb", type=float, help="perturb the stationarity ensembles (negative control)")
    sub.add_parser("sweep", parents=[common], help="reports over a parameter grid")
    lim = sub.add_parser("limit", parents=[common], help="regulator convergence study")
    lim.add_argument("--alpha", type=_complex_arg, metavar="RE,IM")
    lim.add_argument("--regulator", choices=("cutoff", "damping"), default="damping")
    lim.add_argument("--M", type=float, default=50.0)
    lim.add_argument("--epsilon", type=float, default=1e-3)
    lim.add_argument("--levels", type=int, default=4)
    sub.add_parser("analogy", parents=[common], help="compare quantum and thermal engines at lam=beta")
    return parser


DEFAULT_FORMAT = {"report": "json", "verify": "json", "sweep": "csv", "limit": "csv", "analogy": "json"}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = DEFAULT_FORMAT[args.command]
    if args.seed is not None and not 0 <= args.seed < 2**64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QuantropyError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
