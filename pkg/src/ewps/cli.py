"""Command-line interface: ``ewps {fit,compare,simulate,eval,describe}``.

Exit status is 0 on success, 1 on usage errors and 2 on numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import entropy, moments
from .data import atomic_write_text, describe, phosphorus, read_dataset, write_dataset
from .errors import (DivergenceError, DomainError, InsufficientDataError, NonexistentMomentError,
                     TruncationError)
from .generators import GENERATORS, get_generator
from .inference import FitConfig, fit
from .model import EwpsModel
from .power_series import POWER_SERIES, get_power_series

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2

# short names for the models fitted to the phosphorus data, plus EG
MODEL_ALIASES = {
    "mwg": ("geometric", "modified_weibull"),
    "wg": ("geometric", "weibull"),
    "gp": ("poisson", "gompertz"),
    "pp": ("poisson", "pareto"),
    "cp": ("poisson", "chen"),
    "cl": ("logarithmic", "chen"),
    "eg": ("geometric", "exponential"),
}

NUMERIC_ERRORS = (DivergenceError, TruncationError, NonexistentMomentError, InsufficientDataError,
                  FloatingPointError, np.linalg.LinAlgError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ----------------------------------------------------------------------
# argument helpers
# ----------------------------------------------------------------------
def _add_model_args(p: argparse.ArgumentParser, with_values: bool) -> None:
    p.add_argument("--model", choices=sorted(MODEL_ALIASES),
                   help="shortcut for a mixer/generator pair")
    p.add_argument("--mixer", choices=sorted(POWER_SERIES), help="power-series mixer")
    p.add_argument("--generator", choices=sorted(GENERATORS), help="extended-Weibull generator")
    p.add_argument("--trials", type=int, default=None, help="binomial number of trials m (default 10)")
    p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE",
                   help="generator shape parameter (repeatable); a starting value when fitting")
    if with_values:
        p.add_argument("--theta", type=float, required=True, help="mixer parameter")
        p.add_argument("--alpha", type=float, default=1.0, help="rate parameter (default 1)")
        p.add_argument("--relaxed", action="store_true",
                       help="admit lambda < 0 for the modified Weibull generator")


def _add_data_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--data", help="text file, one value per line ('#' comments, optional header)")
    src.add_argument("--embedded", action="store_true",
                     help="use the embedded phosphorus data (the default)")


def _add_fit_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", choices=("em", "direct", "em_then_direct"), default="em_then_direct")
    p.add_argument("--max-iter", type=int, default=2000)
    p.add_argument("--loglik-tol", type=float, default=1e-9)
    p.add_argument("--param-tol", type=float, default=1e-8)
    p.add_argument("--multistart", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)


def _parse_params(items: list[str]) -> dict[str, float]:
    out = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects NAME=VALUE, got {item!r}")
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise UsageError(f"--param {name}: {value!r} is not a number") from None
    return out


def _resolve_pair(args) -> tuple[str, str]:
    if args.model:
        if args.mixer or args.generator:
            raise UsageError("--model cannot be combined with --mixer/--generator")
        return MODEL_ALIASES[args.model]
    if not (args.mixer and args.generator):
        raise UsageError("give --model, or both --mixer and --generator")
    return args.mixer, args.generator


def _build_pair(mixer: str, generator: str, params: dict, trials=None, relaxed=False):
    ps = get_power_series(mixer, m=trials)
    if relaxed:
        params = {**params, "relaxed_domain": True}
    return ps, get_generator(generator, **params)


def _build_model(args) -> EwpsModel:
    mixer, generator = _resolve_pair(args)
    ps, ew = _build_pair(mixer, generator, _parse_params(args.param), args.trials, args.relaxed)
    return EwpsModel(ps, ew, args.theta, args.alpha)


def _load_data(args):
    if getattr(args, "data", None):
        try:
            return read_dataset(args.data)
        except OSError as exc:
            raise UsageError(f"cannot read {args.data}: {exc.strerror}") from None
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return phosphorus()


def _fit_config(args) -> FitConfig:
    return FitConfig(method=args.method, max_iter=args.max_iter, loglik_tol=args.loglik_tol,
                     param_tol=args.param_tol, multistart=args.multistart, seed=args.seed)


def _fmt(v) -> str:
    return "" if v is None else f"{v:.10g}"


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------
def _plot_table(model: EwpsModel, x: np.ndarray) -> str:
    grid = np.linspace(x.min(), x.max(), 400)
    xs = np.sort(x)
    ecdf = np.searchsorted(xs, grid, side="right") / xs.size
    pdf, cdf = np.asarray(model.pdf(grid)), np.asarray(model.cdf(grid))
    lines = ["x,pdf,cdf,ecdf"]
    lines += [f"{a:.10g},{b:.10g},{c:.10g},{d:.10g}" for a, b, c, d in zip(grid, pdf, cdf, ecdf)]
    return "\n".join(lines) + "\n"


def _write_json(path, doc) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True, allow_nan=True) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        atomic_write_text(path, text)


def cmd_fit(args) -> int:
    mixer, generator = _resolve_pair(args)
    data = _load_data(args)
    ps, ew = _build_pair(mixer, generator, _parse_params(args.param), args.trials)
    config = _fit_config(args)
    try:
        report = fit(ps, ew, data, config)
    except NUMERIC_ERRORS as exc:
        _write_json(args.report, {"mixer": mixer, "generator": generator, "converged": False,
                                  "error": f"{type(exc).__name__}: {exc}", "n": len(data)})
        print(f"ewps fit: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    doc = report.to_dict()
    doc["data"] = {"label": data.label, "source": data.source}
    _write_json(args.report, doc)
    if args.plot:
        atomic_write_text(args.plot, _plot_table(report.model, np.asarray(data)))
    if not report.converged:
        print("ewps fit: optimizer did not converge", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def _compare_one(job):
    name, mixer, generator, values, config = job
    try:
        ps, ew = _build_pair(mixer, generator, {})
        r = fit(ps, ew, values, config)
        return {"model": name, "neg2loglik": r.neg2loglik, **r.criteria, "KS": r.ks,
                "converged": r.converged, "error": None}
    except (DomainError, *NUMERIC_ERRORS) as exc:
        return {"model": name, "neg2loglik": None, "AIC": None, "BIC": None, "AICC": None,
                "CAIC": None, "KS": None, "converged": False, "error": f"{type(exc).__name__}: {exc}"}


def compare_models(names, data, config: FitConfig, jobs: int = 1) -> list[dict]:
    """Fit each aliased model and return rows sorted by AIC, failures last."""
    values = np.asarray(data, dtype=float)
    work = [(n, *MODEL_ALIASES[n], values, config) for n in names]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_compare_one, work))
    else:
        rows = [_compare_one(w) for w in work]
    return sorted(rows, key=lambda r: (r["AIC"] is None, r["AIC"] if r["AIC"] is not None else 0.0))


COMPARE_COLUMNS = ("model", "neg2loglik", "AIC", "BIC", "AICC", "CAIC", "KS", "converged", "error")


def cmd_compare(args) -> int:
    names = [m.strip().lower() for group in args.models for m in group.split(",") if m.strip()]
    unknown = [m for m in names if m not in MODEL_ALIASES]
    if unknown:
        raise UsageError(f"unknown model(s) {unknown}; choose from {sorted(MODEL_ALIASES)}")
    if len(names) < 2:
        raise UsageError("compare needs at least two models")
    data = _load_data(args)
    rows = compare_models(names, data, _fit_config(args), args.jobs)
    lines = [",".join(COMPARE_COLUMNS)]
    for r in rows:
        cells = []
        for c in COMPARE_COLUMNS:
            v = r[c]
            cells.append(_fmt(v) if isinstance(v, float) else ("" if v is None else str(v)))
        lines.append(",".join(cells))
    text = "\n".join(lines) + "\n"
    if args.out:
        atomic_write_text(args.out, text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be a positive integer")
    model = _build_model(args)
    data = model.sample(args.n, seed=args.seed)
    if args.out in (None, "-"):
        sys.stdout.write("".join(f"{v:.17g}\n" for v in data.values))
    else:
        write_dataset(data, args.out)
        s = describe(data)
        print(json.dumps({"n": s.n, "mean": s.mean, "median": s.median, "min": s.min,
                          "max": s.max}, sort_keys=True))
    return EXIT_OK


def _grid(spec: str) -> np.ndarray:
    """``a,b,c`` for explicit points or ``lo:hi:count`` for an even grid."""
    try:
        if ":" in spec:
            lo, hi, count = spec.split(":")
            return np.linspace(float(lo), float(hi), int(count))
        return np.array([float(v) for v in spec.split(",") if v.strip()])
    except ValueError:
        raise UsageError(f"bad grid {spec!r}; use a,b,c or lo:hi:count") from None


EVAL_FUNCTIONS = ("pdf", "cdf", "survival", "hazard")


def cmd_eval(args) -> int:
    model = _build_model(args)
    if args.x is None and args.u is None and not args.moment and not args.entropy:
        raise UsageError("eval needs --x, --u, --moment or --entropy")
    out = []
    if args.x is not None:
        funcs = [f.strip() for f in args.functions.split(",") if f.strip()]
        bad = [f for f in funcs if f not in EVAL_FUNCTIONS]
        if bad:
            raise UsageError(f"unknown function(s) {bad}; choose from {EVAL_FUNCTIONS}")
        x = _grid(args.x)
        cols = [np.asarray(getattr(model, f)(x), dtype=float) for f in funcs]
        out.append(",".join(["x", *funcs]))
        out += [",".join(_fmt(float(v)) for v in row) for row in zip(x, *cols)]
    if args.u is not None:
        u = _grid(args.u)
        q = np.atleast_1d(model.quantile(u))
        out.append("u,quantile")
        out += [f"{_fmt(float(a))},{_fmt(float(b))}" for a, b in zip(u, q)]
    for r in args.moment:
        out.append(f"moment_{r},{_fmt(moments.raw_moment(model, r))}")
    if args.entropy:
        out.append(f"entropy,{_fmt(entropy.shannon_entropy_numeric(model))}")
    sys.stdout.write("\n".join(out) + "\n")
    return EXIT_OK


def cmd_describe(args) -> int:
    s = describe(_load_data(args))
    print(json.dumps(s.as_dict(), indent=2, sort_keys=True))
    return EXIT_OK


# ----------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ewps", description="Fit, compare, simulate and evaluate compound "
                     "extended-Weibull power-series lifetime distributions.",
                     epilog=f"model shortcuts: {', '.join(f'{k}={v[0]}/{v[1]}' for k, v in MODEL_ALIASES.items())}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="fit one model by maximum likelihood")
    _add_model_args(p, with_values=False)
    _add_data_args(p)
    _add_fit_args(p)
    p.add_argument("--report", default="-", help="JSON report path ('-' for stdout)")
    p.add_argument("--plot", help="CSV with columns x,pdf,cdf,ecdf on a 400-point grid")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("compare", help="fit several models and rank them by AIC")
    p.add_argument("--models", action="append", required=True,
                   help="comma-separated model shortcuts (repeatable)")
    _add_data_args(p)
    _add_fit_args(p)
    p.add_argument("--jobs", type=int, default=1, help="models fitted in parallel")
    p.add_argument("--out", help="also write the table to this CSV path")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("simulate", help="draw variates from a fully specified model")
    _add_model_args(p, with_values=True)
    p.add_argument("--n", type=int, required=True, help="sample size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-", help="output path, one value per line ('-' for stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("eval", help="evaluate distribution functions on a grid")
    _add_model_args(p, with_values=True)
    p.add_argument("--x", help="x grid: a,b,c or lo:hi:count")
    p.add_argument("--functions", default="pdf,cdf,hazard",
                   help=f"comma-separated subset of {','.join(EVAL_FUNCTIONS)}")
    p.add_argument("--u", help="probability grid for the quantile function")
    p.add_argument("--moment", type=int, action="append", default=[], help="raw moment order")
    p.add_argument("--entropy", action="store_true", help="print the Shannon entropy")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("describe", help="descriptive statistics of a dataset")
    _add_data_args(p)
    p.set_defaults(func=cmd_describe)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ewps {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"ewps {args.command}: domain error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NUMERIC_ERRORS as exc:
        print(f"ewps {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
