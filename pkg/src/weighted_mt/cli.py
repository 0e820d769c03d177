"""Command-line entry point: ``weighted-mt <command> [flags]``.

Exit codes: 0 success, 1 property violation, 2 usage error, 3 numeric failure.

Config file grammar (``--config FILE``): one ``key = value`` per line, keys
are long flag names with or without the leading dashes (``a-factor`` and
``a_factor`` are the same key), ``#`` starts a comment, ``true``/``false``
toggle switches.  Flags given on the command line override the file.

The default output directory comes from ``WEIGHTED_MT_OUT`` when ``--out``
is not given.  Without an output directory the primary output goes to
stdout and the run manifest to stderr.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .concentration import classify_dichotomy
from .constants import WeightParams, build_constants, feasibility_scan, printed_constants
from .corpus import estimate_c0, unit_energy
from .errors import DomainError, NumericError
from .extremal import DEFAULT_STARTS, SearchConfig, compare_with_concentration, maximize, result_json, trace_csv
from .functionals import dirichlet_energy, moser_lower_bound, mt_integral_halfline
from .profiles import carleson_chang_test, load_profile, moser_halfline, profile_to_text
from .properties import SUITES, run_suite

OUT_ENV = "WEIGHTED_MT_OUT"
EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ------------------------------------------------------------ formatting


def _num(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_num(v) for v in r])
    return buf.getvalue()


def _json(obj):
    return json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.generic):
        x = x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return x


def _text(d, indent=""):
    lines = []
    for k in sorted(d):
        v = d[k]
        if isinstance(v, dict):
            lines.append(f"{indent}{k}:")
            lines.append(_text(v, indent + "  "))
        else:
            lines.append(f"{indent}{k:<28} {_num(v)}")
    return "\n".join(lines)


class Run:
    """Collects the outputs of one command and writes them plus the manifest."""

    def __init__(self, args):
        self.args = args
        self.out = Path(args.out) if args.out else None
        self.outputs = []
        if self.out is not None:
            self.out.mkdir(parents=True, exist_ok=True)

    def emit(self, text, name):
        """Primary output: stdout, and a file when an output directory is set."""
        sys.stdout.write(text)
        self.file(name, text)

    def file(self, name, text):
        if self.out is None:
            return None
        path = self.out / name
        path.write_text(text)
        self.outputs.append(str(path))
        return path

    def figure(self, kind, name, *a, **kw):
        if not self.args.figures:
            return
        if self.out is None:
            raise UsageError("--figures needs an output directory (--out or $" + OUT_ENV + ")")
        from . import plotting  # matplotlib is only loaded when figures are requested

        path = self.out / name
        getattr(plotting, kind)(*a, path=path, **kw)
        self.outputs.append(str(path))


def _manifest(args, params, wall, outputs):
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "config", "figures")}
    digest = hashlib.sha256(json.dumps(_plain(flags), sort_keys=True).encode()).hexdigest()
    return {
        "command": args.command,
        "params": None if params is None else {"alpha": params.alpha, "beta": params.beta, "sigma": params.sigma},
        "config_digest": digest,
        "tool_version": __version__,
        "wall_time_s": wall,
        "outputs": outputs,
    }


def _params(args):
    return WeightParams(args.alpha, args.beta, getattr(args, "sigma", None))


# -------------------------------------------------------------- commands


def cmd_constants(args, run):
    params = _params(args)
    consts = build_constants(params, c_zero=args.c0, c_one=args.c1)
    d = consts.as_dict()
    printed = printed_constants(params, consts)
    d.update(printed)
    d["note"] = "c_alpha is int_0^pi sin^alpha; the printed closed form carries an extra factor 2"
    if args.format == "json":
        run.emit(_json(d), "constants.json")
    elif args.format == "csv":
        run.emit(_csv(["key", "value"], [(k, d[k]) for k in sorted(d)]), "constants.csv")
    else:
        run.emit(_text(d) + "\n", "constants.txt")
    return EXIT_OK


def _parse_range(spec, flag):
    try:
        lo, hi = (int(x) for x in spec.split(":"))
    except ValueError:
        raise UsageError(f"{flag} expects MIN:MAX, got {spec!r}") from None
    if lo < 1 or lo > hi:
        raise UsageError(f"{flag}: need 1 <= MIN <= MAX, got {spec!r}")
    return lo, hi


def cmd_moser_sweep(args, run):
    params = _params(args)
    consts = build_constants(params)
    if not args.a_factor > 0:
        raise UsageError("--a-factor must be positive")
    if args.n_min < 1 or args.n_min > args.n_max:
        raise UsageError(f"--n-min/--n-max: need 1 <= n_min <= n_max (got {args.n_min}, {args.n_max})")
    a = args.a_factor * consts.a_sharp
    rows = []
    for n in range(args.n_min, args.n_max + 1):
        f = moser_halfline(n, params)
        row = {"n": n, "energy": dirichlet_energy(f, params, consts)}
        try:
            row["eq214_lower_bound"] = moser_lower_bound(n, a, params, consts)
            row["mt_integral"] = mt_integral_halfline(f, a, params, consts)
            row["status"] = "ok"
        except NumericError:
            row.setdefault("eq214_lower_bound", math.nan)
            row["mt_integral"] = math.nan
            row["status"] = "overflow"
        rows.append(row)
    slope = None
    if args.a_factor > 1.0:
        fit = [r for r in rows if r["status"] == "ok" and r["n"] >= max(args.n_min, args.fit_from)]
        if len(fit) >= 2:
            slope = float(np.polyfit([r["n"] for r in fit], [math.log(r["mt_integral"]) for r in fit], 1)[0])
    cols = ["n", "mt_integral", "eq214_lower_bound", "energy", "status"]
    if args.format == "json":
        run.emit(_json({"a_factor": args.a_factor, "fitted_slope": slope, "predicted_slope": args.a_factor - 1.0,
                        "rows": rows}), "moser_sweep.json")
    else:
        run.emit(_csv(cols, [[r[c] for c in cols] for r in rows]), "moser_sweep.csv")
        if slope is not None:
            print(f"fitted log-slope over n >= {max(args.n_min, args.fit_from)}: {slope!r} "
                  f"(predicted {args.a_factor - 1.0!r})", file=sys.stderr)
    run.figure("moser_sweep", "moser_sweep.png", rows, a_factor=args.a_factor)
    return EXIT_OK


def cmd_extremal(args, run):
    params = _params(args)
    consts = build_constants(params)
    starts = tuple(s.strip() for s in args.starts.split(",") if s.strip())
    cfg = SearchConfig(kappa=args.kappa, h=args.h, s_uniform=args.s_uniform, S=args.S, growth=args.growth,
                       max_iters=args.max_iters, starts=starts, direction=args.direction, seed=args.seed)
    res = maximize(params, consts, cfg, keep_trace=args.trace)
    cmp = compare_with_concentration(res, params, consts)
    run.emit(result_json(res, params, consts), "extremal.json")
    run.file("extremal_profile.txt", profile_to_text(res.best_profile, params))
    if args.trace:
        run.file("extremal_trace.csv", trace_csv(res))
    word = "exceeds" if cmp.exceeds_ceiling else "does not exceed"
    print(f"best I+1 = {res.best_I_plus_1!r} {word} the concentration ceiling (margin {cmp.margin!r})",
          file=sys.stderr)
    ref = carleson_chang_test(params.alpha) if args.kappa == 1.0 else None
    run.figure("extremal", "extremal.png", res, reference=ref)
    return EXIT_OK


def _sequence(args, params, consts):
    if args.seq == "moser":
        lo, hi = _parse_range(args.n, "--n")
        return [moser_halfline(n, params) for n in range(lo, hi + 1)]
    if args.seq == "constant":
        u = unit_energy(carleson_chang_test(params.alpha), params, consts)
        return [u] * args.repeat
    if not args.file:
        raise UsageError("--seq file needs at least one --file PATH")
    seq = []
    for path in args.file:
        try:
            prof, _ = load_profile(path)
        except OSError as exc:
            raise UsageError(f"--file: cannot read {path}: {exc.strerror}") from None
        seq.append(prof)
    return seq


def _floats(spec, flag):
    try:
        return [float(x) for x in spec.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"{flag} expects comma-separated numbers, got {spec!r}") from None


def cmd_dichotomy(args, run):
    params = _params(args)
    consts = build_constants(params)
    seq = _sequence(args, params, consts)
    deltas = _floats(args.deltas, "--deltas")
    rep = classify_dichotomy(seq, params, consts, concentration_tol=args.tol, deltas=deltas, j_tol=args.j_tol)
    if args.format == "csv":
        run.emit(rep.to_csv(), "dichotomy.csv")
        run.file("dichotomy.json", rep.to_json() + "\n")
    else:
        run.emit(rep.to_json() + "\n", "dichotomy.json")
        run.file("dichotomy.csv", rep.to_csv())
    print(f"verdict: {rep.verdict}", file=sys.stderr)
    run.figure("dichotomy", "dichotomy.png", rep)
    return EXIT_OK


def cmd_verify(args, run):
    if args.which not in SUITES:
        raise UsageError(f"--which: unknown target {args.which!r}; choose from {', '.join(SUITES)}")
    params = _params(args)
    consts = build_constants(params)
    res = run_suite(args.which, params, consts, n=args.n, seed=args.seed, a_factor=args.a_factor, c_zero=args.c0)
    for k, v in enumerate(res.violations):
        if v.profile is not None:
            p = run.file(f"violation_{args.which}_{k}.txt", profile_to_text(v.profile, params))
            v.detail["profile_file"] = None if p is None else str(p)
    d = res.as_dict()
    if args.format == "text":
        status = "PASS" if res.passed else "FAIL"
        run.emit(f"{status} {res.name}: {res.n_pass}/{res.n_cases} cases pass\n", "verify.txt")
    else:
        run.emit(_json(d), "verify.json")
    return EXIT_OK if res.passed else EXIT_VIOLATION


def _grid(lo, hi, steps, flag, open_low=False):
    if lo > hi:
        raise UsageError(f"{flag}: degenerate range (min {lo} > max {hi})")
    if steps < 1:
        raise UsageError(f"{flag}: need at least one step")
    if steps == 1:
        return [lo]
    if open_low:
        return list(np.linspace(lo, hi, steps + 1)[1:])
    return list(np.linspace(lo, hi, steps))


def cmd_feasibility(args, run):
    if args.alpha is not None or args.sigma is not None:
        if args.alpha is None or args.sigma is None:
            raise UsageError("single-point mode needs both --alpha and --sigma")
        alphas, sigmas = [args.alpha], [args.sigma]
    else:
        alphas = _grid(args.alpha_min, args.alpha_max, args.alpha_steps, "--alpha-min/--alpha-max")
        # sigma range is open at its lower end: (sigma_min, sigma_max]
        sigmas = _grid(args.sigma_min, args.sigma_max, args.sigma_steps, "--sigma-min/--sigma-max", open_low=True)
    for a in alphas:
        if not a > -1.0:
            raise UsageError(f"--alpha: {a} must exceed -1")
    for s in sigmas:
        if not s > 0.0:
            raise UsageError(f"--sigma: {s} must be positive")
    rows = feasibility_scan(alphas, sigmas)
    n_ok = sum(r.feasible for r in rows)
    summary = (f"{n_ok} of {len(rows)} grid points feasible" if n_ok
               else f"no feasible point found among {len(rows)} grid points")
    cols = ["alpha", "sigma", "gamma_phi0", "bound", "growth_ratio", "feasible"]
    if args.format == "json":
        run.emit(_json({"summary": summary, "any_feasible": bool(n_ok),
                        "rows": [{c: getattr(r, c) for c in cols} for r in rows]}), "feasibility.json")
    else:
        run.emit(_csv(cols, [[getattr(r, c) for c in cols] for r in rows]), "feasibility.csv")
        print(summary, file=sys.stderr)
    run.figure("feasibility", "feasibility.png", rows)
    return EXIT_OK


def cmd_estimate_c0(args, run):
    params = _params(args)
    consts = build_constants(params)
    est, name, rows = estimate_c0(params, consts, args.n_random, args.seed)
    run.emit(_json({"c0_estimate": est, "argmax": name,
                    "rows": [{"profile": n, "I_over_q": v} for n, v in rows]}), "estimate_c0.json")
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _common(p, need_params=True, sigma=False, formats=("json",), default=None):
    if need_params:
        p.add_argument("--alpha", type=float, required=True, help="energy weight exponent (> -1)")
        p.add_argument("--beta", type=float, required=True, help="measure weight exponent (> -1)")
    if sigma:
        p.add_argument("--sigma", type=float, default=None, help="splitting parameter (> 0)")
    p.add_argument("--format", choices=formats, default=default or formats[0])
    p.add_argument("--out", default=os.environ.get(OUT_ENV) or None,
                   help=f"output directory (default ${OUT_ENV}; none means stdout only)")
    p.add_argument("--figures", action="store_true", help="also write PNG figures to the output directory")


def build_parser():
    top = _Parser(prog="weighted-mt", description="Weighted Moser-Trudinger numerics on the upper half-plane.")
    top.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    top.add_argument("--config", help="key=value config file; command-line flags override it")
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("constants", help="sharp constants and derived quantities")
    _common(p, sigma=True, formats=("json", "csv", "text"))
    p.add_argument("--c0", type=float, default=1.0, help="normalization constant c0")
    p.add_argument("--c1", type=float, default=1.0, help="tail constant c1")
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("moser-sweep", help="exponential integral along the Moser sequence")
    _common(p, formats=("csv", "json"))
    p.add_argument("--a-factor", type=float, default=1.0, help="a = a_factor * a_sharp")
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--n-max", type=int, default=40)
    p.add_argument("--fit-from", type=int, default=20, help="smallest n used in the log-slope fit")
    p.set_defaults(func=cmd_moser_sweep)

    p = sub.add_parser("extremal", help="constrained maximization of I over the half-line")
    _common(p)
    p.add_argument("--kappa", type=float, default=1.0, help="energy cap kappa^(2+alpha)")
    p.add_argument("--h", type=float, default=0.05, help="uniform grid spacing")
    p.add_argument("--s-uniform", type=float, default=20.0, help="end of the uniform part of the grid")
    p.add_argument("--S", type=float, default=80.0, help="plateau start")
    p.add_argument("--growth", type=float, default=1.1, help="geometric growth past s-uniform")
    p.add_argument("--max-iters", type=int, default=10000)
    p.add_argument("--starts", default=",".join(DEFAULT_STARTS), help="comma-separated start names")
    p.add_argument("--direction", choices=("energy-dual", "euclidean"), default="energy-dual")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trace", action="store_true", help="write the per-iteration trace CSV")
    p.set_defaults(func=cmd_extremal)

    p = sub.add_parser("dichotomy", help="classify a profile sequence")
    _common(p, sigma=True, formats=("json", "csv"))
    p.add_argument("--seq", choices=("moser", "constant", "file"), required=True)
    p.add_argument("--n", default="5:40", help="Moser range MIN:MAX")
    p.add_argument("--repeat", type=int, default=10, help="length of the constant sequence")
    p.add_argument("--file", action="append", help="profile file (repeatable, in sequence order)")
    p.add_argument("--deltas", default="0.5,0.25,0.1")
    p.add_argument("--tol", type=float, default=0.2, help="concentration tolerance on tail energies")
    p.add_argument("--j-tol", type=float, default=1e-4, help="spread allowed in the J window")
    p.set_defaults(func=cmd_dichotomy)

    p = sub.add_parser("verify", help="run a seeded property suite")
    _common(p, formats=("json", "text"))
    p.add_argument("--which", required=True, help=f"one of {', '.join(SUITES)}")
    p.add_argument("--n", type=int, default=None, help="number of cases or random corpus members")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--a-factor", type=float, default=1.0, help="theorem11 only: a = a_factor * a_sharp")
    p.add_argument("--c0", type=float, default=None, help="c0 (default: corpus estimate)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("feasibility", help="scan the existence hypotheses over (alpha, sigma)")
    _common(p, need_params=False, formats=("csv", "json"))
    p.add_argument("--alpha", type=float, default=None, help="single point (with --sigma)")
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--alpha-min", type=float, default=0.0)
    p.add_argument("--alpha-max", type=float, default=5.0)
    p.add_argument("--alpha-steps", type=int, default=26)
    p.add_argument("--sigma-min", type=float, default=0.0, help="exclusive lower end")
    p.add_argument("--sigma-max", type=float, default=3.0)
    p.add_argument("--sigma-steps", type=int, default=30)
    p.set_defaults(func=cmd_feasibility)

    p = sub.add_parser("estimate-c0", help="corpus lower estimate of c0")
    _common(p)
    p.add_argument("--n-random", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_estimate_c0)
    return top


# ---------------------------------------------------------------- config


def read_config(path):
    """Parse the key=value config grammar into (key, value) pairs."""
    pairs = []
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"--config: cannot read {path}: {exc.strerror}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"--config {path}:{lineno}: expected key = value")
        key, value = (x.strip() for x in line.split("=", 1))
        pairs.append((key.lstrip("-").replace("_", "-"), value))
    return pairs


def _config_argv(pairs, subparser):
    known = {}
    for action in subparser._actions:
        for opt in action.option_strings:
            if opt.startswith("--"):
                known[opt[2:]] = action
    argv = []
    for key, value in pairs:
        action = known.get(key)
        if action is None:
            raise UsageError(f"--config: unknown key {key!r}")
        if action.nargs == 0:
            if value.lower() in ("true", "yes", "1"):
                argv.append("--" + key)
            elif value.lower() not in ("false", "no", "0"):
                raise UsageError(f"--config: {key} expects true/false")
        else:
            argv += ["--" + key, value]
    return argv


def _split_config(argv):
    """Pull ``--config FILE`` out of argv wherever it appears."""
    rest, path = [], None
    it = iter(argv)
    for tok in it:
        if tok == "--config":
            path = next(it, None)
            if path is None:
                raise UsageError("--config needs a file name")
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
        else:
            rest.append(tok)
    return rest, path


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    started = time.perf_counter()
    try:
        argv, cfg_path = _split_config(argv)
        if cfg_path is not None:
            cmd_idx = next((i for i, t in enumerate(argv) if not t.startswith("-")), None)
            if cmd_idx is None:
                raise UsageError("--config given without a command")
            subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
            sp = subparsers.choices.get(argv[cmd_idx])
            if sp is None:
                raise UsageError(f"unknown command {argv[cmd_idx]!r}")
            # file values go first so later command-line flags win
            argv = argv[: cmd_idx + 1] + _config_argv(read_config(cfg_path), sp) + argv[cmd_idx + 1 :]
        args = parser.parse_args(argv)
        run = Run(args)
        code = args.func(args, run)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    params = None
    if getattr(args, "alpha", None) is not None and getattr(args, "beta", None) is not None:
        params = _params(args)
    man = _manifest(args, params, time.perf_counter() - started, run.outputs)
    if run.out is not None:
        path = run.out / "manifest.json"
        man["outputs"].append(str(path))
        path.write_text(_json(man))
    else:
        print(json.dumps(_plain(man), sort_keys=True), file=sys.stderr)
    return code


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
