"""Command-line front end: ``himax <command> [options]``."""
import argparse
import json
import sys

from . import __version__
from .approximations import ApproxKind, ApproxParams, critical_value, p_value, rate_gap
from .coherence import certify, verify_on_sample
from .montecarlo import STATISTICS, SimConfig, estimate_levels, reproduce_table
from .numerics import BracketError
from .statistics import load_csv, statistic_L_tilde, statistic_W

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

_DEFAULT_APPROX = {"W": ApproxKind.INTERMEDIATE, "L_tilde": ApproxKind.INTERMEDIATE}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text):
    return [int(float(v)) for v in text.split(",") if v.strip()]


def _grid(text):
    cells = []
    for item in text.split(","):
        n, _, p = item.partition(":")
        cells.append((int(n), int(p)))
    return cells


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads, 0 = all cores (default: $HIMAX_THREADS or 1)")

    parser = _Parser(prog="himax", description=__doc__)
    parser.add_argument("--version", action="version", version=f"himax {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("test", parents=[common], help="run an independence test on a CSV dataset")
    p.add_argument("--file", required=True)
    p.add_argument("--statistic", choices=("W", "L_tilde"), default="W")
    p.add_argument("--approx", choices=[k.value for k in ApproxKind], default=None)
    p.add_argument("--alpha", type=float, default=0.05)

    p = sub.add_parser("critval", parents=[common], help="critical value y_alpha")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--approx", choices=[k.value for k in ApproxKind], default="intermediate")
    p.add_argument("--alpha", type=float, default=0.05)

    p = sub.add_parser("coherence", parents=[common], help="sparse-recovery coherence certificate")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--n", type=int)
    src.add_argument("--file", help="dictionary CSV; n and p are read from it and it is checked")
    p.add_argument("--p", type=int)
    p.add_argument("--alpha", type=float, default=0.05)

    p = sub.add_parser("simulate", parents=[common], help="estimate significance levels")
    p.add_argument("--config", help="JSON SimConfig file (other flags then ignored)")
    p.add_argument("--distribution", default="standard_normal")
    p.add_argument("--df", type=int, default=None)
    p.add_argument("--grid", type=_grid, default=None, help="comma list of n:p cells")
    p.add_argument("--replications", type=int, default=5000)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--statistics", default=",".join(STATISTICS))

    p = sub.add_parser("table", parents=[common], help="reproduce a full level table")
    p.add_argument("--which", type=int, choices=(1, 2), required=True)
    p.add_argument("--replications", type=int, default=5000)

    p = sub.add_parser("rategap", parents=[common], help="intermediate-vs-limit CDF gap")
    p.add_argument("--p", type=_floats, required=True, help="comma list of dimensions")
    p.add_argument("--y", type=_floats, default=[-1.0, 0.0, 2.0])
    return parser


def _cmd_test(args):
    data, _ = load_csv(args.file)
    stat = (statistic_W if args.statistic == "W" else statistic_L_tilde)(data)
    approx = ApproxKind(args.approx) if args.approx else _DEFAULT_APPROX[args.statistic]
    params = ApproxParams(p=stat.p, n=stat.n, d=2 if args.statistic == "W" else 1)
    crit = critical_value(params, approx, args.alpha)
    pval = p_value(stat, approx, params)
    row = {
        "statistic": stat.kind,
        "value": stat.value,
        "n": stat.n,
        "p": stat.p,
        "argmax_pair": list(stat.argmax_pair),
        "approx": approx.value,
        "alpha": args.alpha,
        "critical_value": crit,
        "p_value": pval,
        "decision": "reject" if stat.value > crit else "accept",
    }
    inputs = {"file": args.file, "statistic": args.statistic, "approx": approx.value, "alpha": args.alpha}
    return inputs, [row]


def _cmd_critval(args):
    params = ApproxParams(p=args.p, n=args.n, d=args.d)
    y = critical_value(params, args.approx, args.alpha)
    inputs = {"p": args.p, "n": args.n, "d": args.d, "approx": args.approx, "alpha": args.alpha}
    return inputs, [{"alpha_p": params.alpha_p, "critical_value": y}]


def _cmd_coherence(args):
    if args.file:
        data, _ = load_csv(args.file)
        n, p = data.shape
    else:
        if args.p is None:
            raise UsageError("coherence: --p is required with --n")
        n, p, data = args.n, args.p, None
    cert = certify(n, p, args.alpha)
    row = cert.to_dict()
    if data is not None:
        m, holds = verify_on_sample(data, cert)
        row.update(mutual_coherence=m, bound_holds=holds)
    return {"n": n, "p": p, "alpha": args.alpha, "file": args.file}, [row]


def _cells(result):
    return [
        {
            "distribution": c.distribution, "n": c.n, "p": c.p, "statistic": c.statistic,
            "R": c.replications, "rejections": c.rejections, "level": c.level,
            "se": c.standard_error, "critical_value": c.critical_value, "approx": c.approx,
        }
        for c in result.cells
    ]


def _cmd_simulate(args):
    if args.config:
        config = SimConfig.from_json(args.config)
    else:
        if args.grid is None:
            raise UsageError("simulate: give --config or --grid")
        config = SimConfig(
            grid=args.grid, distribution=args.distribution, df=args.df,
            replications=args.replications, nominal_alpha=args.alpha, seed=args.seed,
            statistics=tuple(s for s in args.statistics.split(",") if s),
        )
    result = estimate_levels(config, threads=args.threads)
    inputs = {"grid": [list(c) for c in config.grid], "distribution": config.distribution,
              "df": config.df, "replications": config.replications,
              "alpha": config.nominal_alpha, "seed": config.seed}
    return inputs, result


def _cmd_table(args):
    result, _, _ = reproduce_table(args.which, args.replications, args.seed, threads=args.threads)
    return {"which": args.which, "replications": args.replications, "seed": args.seed}, result


def _cmd_rategap(args):
    rows = []
    for p in args.p:
        for y in args.y:
            exact, pred = rate_gap(p, y)
            rows.append({"p": p, "y": y, "exact_gap": exact, "prediction": pred, "ratio": exact / pred})
    return {"p": args.p, "y": args.y}, rows


_COMMANDS = {
    "test": _cmd_test, "critval": _cmd_critval, "coherence": _cmd_coherence,
    "simulate": _cmd_simulate, "table": _cmd_table, "rategap": _cmd_rategap,
}


def _fmt(v):
    if isinstance(v, float):
        return format(v, ".10g")
    if isinstance(v, list):
        return " ".join(_fmt(x) for x in v)
    return str(v)


def _render(command, fmt, inputs, results, out):
    sim = not isinstance(results, list)
    if fmt == "json":
        rows = _cells(results) if sim else results
        doc = {"command": command, "inputs": inputs, "results": rows, "version": __version__}
        out.write(json.dumps(doc, indent=2) + "\n")
    elif sim:
        out.write(results.to_csv() if fmt == "csv" else results.to_text())
    elif fmt == "csv":
        keys = list(results[0])
        out.write(",".join(keys) + "\n")
        for r in results:
            out.write(",".join(repr(r[k]) if isinstance(r[k], float) else _fmt(r[k]) for k in keys) + "\n")
    else:
        for i, r in enumerate(results):
            if i:
                out.write("\n")
            width = max(len(k) for k in r)
            for k, v in r.items():
                out.write(f"{k:<{width}}  {_fmt(v)}\n")


def run(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        inputs, results = _COMMANDS[args.command](args)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        err.write(f"himax: {exc.filename or ''}: {exc.strerror or exc}\n")
        return EXIT_DATA
    except (ValueError, BracketError, ArithmeticError, RuntimeError) as exc:
        err.write(f"himax: {exc}\n")
        return EXIT_DATA
    _render(args.command, args.format, inputs, results, out)
    return EXIT_OK


def main():
    sys.exit(run())
