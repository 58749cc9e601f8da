"""Command-line front end.

Every subcommand writes JSON (stdout unless ``--out`` is given) and,
where it makes sense, CSV tables and an optional SVG. Outputs depend only
on the arguments, so repeated runs are byte-identical; wall-clock timings
appear only with ``--timings``.

Exit codes: 0 success, 1 usage error, 2 failed verdict, 3 I/O error,
4 exhausted budget.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from . import _kernels, _svg
from .arithmetic import ContinuedFractionExpansion, classify, continued_fraction, parse_alpha, \
    self_referential_quotients
from .construct import alpha_label, build_nonkam, solve_beta, verify_certificate
from .errors import BudgetError, ModeLockedError
from .families import arnold, nonkam_g
from .herman import phi_from_g
from .norms import asymptotic_slope, cr_norm
from .rotation import mode_lock_interval, rotation_number, solve_parameter
from .singularity import conjugacy_residual, empirical_conjugacy, herman_profile, \
    singularity_indicator

EXIT_OK, EXIT_USAGE, EXIT_VERDICT, EXIT_IO, EXIT_BUDGET = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- argument helpers -------------------------------------------------------------------


def linspace(text: str) -> np.ndarray:
    """``a:b:count`` (inclusive ends) or a single number."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) == 3:
            count = int(parts[2])
            if count < 1:
                raise ValueError
            return np.linspace(float(parts[0]), float(parts[1]), count)
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected a number or a:b:count, got {text!r}")


def int_list(text: str):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def float_list(text: str):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def rational_list(text: str):
    try:
        return [Fraction(v.strip()) for v in text.split(",") if v.strip()]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected comma-separated p/q values, got {text!r}")


def alpha_arg(text: str):
    try:
        return parse_alpha(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def read_config(path: str):
    """``key = value`` lines; ``#`` starts a comment."""
    items = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            items.append((key.replace("_", "-"), value))
    return items


def _config_tokens(parser, items):
    flags = {a.dest.replace("_", "-"): a for a in parser._actions}
    flags.update({o.lstrip("-"): a for a in parser._actions for o in a.option_strings})
    tokens = []
    for key, value in items:
        action = flags.get(key)
        if action is None:
            raise UsageError(f"unknown config key {key!r}")
        opt = action.option_strings[0]
        if isinstance(action, argparse._StoreTrueAction):
            if value.lower() in ("1", "true", "yes", "on"):
                tokens.append(opt)
        else:
            tokens += [opt, value]
    return tokens


# -- output helpers ---------------------------------------------------------------------


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def _emit(args, obj):
    text = dumps(obj)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_text(path, text):
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _r(v) -> str:
    return repr(float(v))


# -- commands ---------------------------------------------------------------------------


def cmd_rotnum(args):
    est = rotation_number(arnold(args.lam, args.sigma), args.method, args.N, args.x0)
    _emit(args, {"family": "arnold", "lambda": args.lam, "sigma": args.sigma, **est.to_dict()})
    return EXIT_OK


def _tongue_row(sigma, lams, N):
    amps = np.full((lams.shape[0], 1), sigma / (2.0 * math.pi))
    return _kernels.weighted_birkhoff_grid(lams, amps, np.array([1], dtype=np.int64),
                                           np.array([0.0]), N)


def cmd_tongues(args):
    lams, sigmas = args.lam, args.sigma
    if np.any(sigmas < 0) or np.any(sigmas >= 1):
        raise UsageError("sigma values must lie in [0, 1)")
    with ThreadPoolExecutor(max_workers=max(1, args.threads)) as pool:
        rows = list(pool.map(lambda s: _tongue_row(float(s), lams, args.N), sigmas))
    raster = np.vstack(rows)
    if args.csv:
        lines = ["lambda,sigma,rho"]
        for i, s in enumerate(sigmas):
            for j, lam in enumerate(lams):
                lines.append(f"{_r(lam)},{_r(s)},{_r(raster[i, j])}")
        _write_text(args.csv, "\n".join(lines) + "\n")
    if args.svg:
        _svg.heatmap(raster, args.svg)
    intervals = []
    for r in args.rationals or []:
        for s in sigmas:
            lo, hi = mode_lock_interval(None, r, float(s), tol=args.tol)
            intervals.append({"rational": r, "sigma": float(s), "lo": lo, "hi": hi,
                              "width": hi - lo})
    _emit(args, {"shape": [len(sigmas), len(lams)], "N": args.N, "method": "weighted_birkhoff",
                 "rows": "sigma", "columns": "lambda", "locking_intervals": intervals})
    return EXIT_OK


def cmd_solve_beta(args):
    alpha = args.alpha
    if args.n is not None:
        beta, sol = solve_beta(alpha, args.n, args.iota, args.nu)
        out = {"mode": "nonkam", "alpha": alpha_label(alpha), "n": args.n, "iota": args.iota,
               "nu": args.nu, "beta": beta, "locked": sol.locked,
               "conjugate_bracket": list(sol.bracket)}
    else:
        lo, hi = args.bracket
        sol = solve_parameter(lambda lam: arnold(lam, args.sigma), alpha, (lo, hi), tol=args.tol)
        out = {"mode": "arnold", "alpha": alpha_label(alpha), "sigma": args.sigma,
               "lambda": sol.parameter, "rotation": sol.rotation, "locked": sol.locked,
               "bracket": list(sol.bracket)}
    _emit(args, out)
    return EXIT_OK


def cmd_construct(args):
    nu = args.nu if args.nu is not None else args.eps / 2.0
    try:
        cert = build_nonkam(args.alpha, args.iota, args.eps, nu, args.delta, args.M,
                            max_candidates=args.max_candidates, orbit_budget=args.orbit_budget)
    except BudgetError as exc:
        sys.stderr.write(f"budget exhausted: {exc}\n")
        if exc.best is not None:
            _emit(args, exc.best.to_dict(args.timings))
        return EXIT_BUDGET
    _emit(args, cert.to_dict(args.timings))
    if args.csv:
        cert.export_csv(args.csv)
    return EXIT_OK if cert.passed else EXIT_VERDICT


def cmd_verify(args):
    with open(args.certificate) as fh:
        data = json.load(fh)
    cert = verify_certificate(data)
    _emit(args, {"verified": cert.passed, "measurements": cert.measurements,
                 "verdict": cert.verdict, "chosen": cert.chosen})
    return EXIT_OK if cert.passed else EXIT_VERDICT


def cmd_norms(args):
    reports, table = [], ["n,r,cr_value,cr_upper,holder_seminorm,sin_factor"]
    curves = {}
    for n in args.n:
        phi = phi_from_g(nonkam_g(args.beta, n, args.iota, args.nu))
        grid = args.grid or 64 * n
        for r in args.r:
            rep = cr_norm(phi, r, grid)
            s = abs(math.sin(math.pi * n * args.beta))
            reports.append({"n": n, "r": r, "sin_factor": s, **rep.to_dict()})
            table.append(f"{n},{_r(r)},{_r(rep.cr_value)},{_r(rep.cr_upper)},"
                         f"{_r(rep.holder_seminorm)},{_r(s)}")
            curves.setdefault(f"r={r}", ([], []))
            curves[f"r={r}"][0].append(n)
            curves[f"r={r}"][1].append(rep.cr_value)
    slopes = {}
    if len(args.n) >= 4:
        slopes = {k: asymptotic_slope(zip(*v)) for k, v in curves.items()}
    if args.csv:
        _write_text(args.csv, "\n".join(table) + "\n")
    if args.svg:
        _svg.lines(curves, args.svg)
    _emit(args, {"beta": args.beta, "iota": args.iota, "nu": args.nu, "reports": reports,
                 "slopes": slopes})
    return EXIT_OK


def cmd_classify(args):
    if args.quotients:
        cf = ContinuedFractionExpansion.from_quotients(args.quotients)
    elif args.synthetic:
        cf = ContinuedFractionExpansion.from_quotients(self_referential_quotients(args.depth))
    elif args.alpha is not None:
        cf = continued_fraction(args.alpha, args.depth)
    else:
        raise UsageError("one of --alpha, --quotients or --synthetic is required")
    result = classify(cf, args.D, args.tau, args.C, args.mu)
    _emit(args, {"expansion": cf.to_dict(), "classification": result.to_dict()})
    return EXIT_OK


def cmd_singularity(args):
    if args.alpha is not None:
        sol = solve_parameter(lambda lam: arnold(lam, args.sigma), args.alpha, (0.0, 1.0),
                              tol=1e-13, N=20_000)
        lam = sol.parameter
    elif args.lam is not None:
        lam = args.lam
    else:
        raise UsageError("one of --lambda or --alpha is required")
    g = arnold(lam, args.sigma)
    profile = herman_profile(g, args.n_max, args.quadrature)
    out = {
        "lambda": lam,
        "sigma": args.sigma,
        "herman_functional": min(v for _, v in profile),
        "herman_profile": [list(p) for p in profile],
        "heuristic": True,
    }
    try:
        h = empirical_conjugacy(g, args.orbit, args.grid)
    except ModeLockedError as exc:
        out["mode_locked"] = str(exc)
    else:
        alpha = float(args.alpha) if args.alpha is not None else h.rotation.value
        out["rotation"] = h.rotation.to_dict()
        out["conjugacy_residual"] = conjugacy_residual(h, g, alpha)
        out["singularity_indicator"] = singularity_indicator(h, args.mass)
        out["mass"] = args.mass
        if args.csv:
            h.to_csv(args.csv)
    _emit(args, out)
    return EXIT_OK


# -- parser ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key = value file; explicit flags win")
    common.add_argument("--out", help="JSON output path (default stdout)")
    common.add_argument("--threads", type=int, default=1)

    p = _Parser(prog="nonkam", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("rotnum", parents=[common], help="rotation number of an Arnold map")
    s.add_argument("--lambda", dest="lam", type=float, required=True)
    s.add_argument("--sigma", type=float, required=True)
    s.add_argument("--method", default="weighted",
                   choices=["weighted", "weighted_birkhoff", "birkhoff", "plain"])
    s.add_argument("--N", type=int, default=10_000)
    s.add_argument("--x0", type=float, default=0.0)
    s.set_defaults(func=cmd_rotnum)

    s = sub.add_parser("tongues", parents=[common], help="rotation-number raster over (lambda, sigma)")
    s.add_argument("--lambda", dest="lam", type=linspace, required=True)
    s.add_argument("--sigma", type=linspace, required=True)
    s.add_argument("--N", type=int, default=1000)
    s.add_argument("--rationals", type=rational_list,
                   help="p/q list; locking intervals are located at every sigma")
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--csv", help="raster CSV path (lambda, sigma, rho)")
    s.add_argument("--svg", help="heatmap SVG path")
    s.set_defaults(func=cmd_tongues)

    s = sub.add_parser("solve-beta", parents=[common], help="solve a translation for a rotation number")
    s.add_argument("--alpha", type=alpha_arg, required=True)
    s.add_argument("--n", type=int, help="frequency of the non-KAM family (else Arnold family)")
    s.add_argument("--iota", type=int, default=2)
    s.add_argument("--nu", type=float, default=0.1)
    s.add_argument("--sigma", type=float, default=0.5)
    s.add_argument("--bracket", type=float_list, default=[0.0, 1.0])
    s.add_argument("--tol", type=float, default=1e-12)
    s.set_defaults(func=cmd_solve_beta)

    s = sub.add_parser("construct", parents=[common], help="build a non-KAM invariant circle")
    s.add_argument("--alpha", type=alpha_arg, required=True)
    s.add_argument("--iota", type=int, default=2)
    s.add_argument("--eps", type=float, default=0.25)
    s.add_argument("--nu", type=float)
    s.add_argument("--delta", type=float, default=0.5)
    s.add_argument("--M", type=float, default=5.0)
    s.add_argument("--max-candidates", type=int, default=50)
    s.add_argument("--orbit-budget", type=int, default=10**7)
    s.add_argument("--csv", help="graph CSV path (x, phi, psi)")
    s.add_argument("--timings", action="store_true", help="include wall-clock timings")
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("verify", parents=[common], help="re-check a certificate")
    s.add_argument("--certificate", required=True)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("norms", parents=[common], help="C^r norms of the non-KAM perturbation")
    s.add_argument("--beta", type=alpha_arg, required=True)
    s.add_argument("--n", type=int_list, required=True)
    s.add_argument("--iota", type=int, default=3)
    s.add_argument("--nu", type=float, default=0.1)
    s.add_argument("--r", type=float_list, default=[2.75, 3.0])
    s.add_argument("--grid", type=int)
    s.add_argument("--csv")
    s.add_argument("--svg")
    s.set_defaults(func=cmd_norms)

    s = sub.add_parser("classify", parents=[common], help="continued fraction and witnesses")
    s.add_argument("--alpha", type=alpha_arg)
    s.add_argument("--quotients", type=int_list)
    s.add_argument("--synthetic", action="store_true", help="use a_{k+1} = q_k quotients")
    s.add_argument("--depth", type=int, default=40)
    s.add_argument("--D", type=float)
    s.add_argument("--tau", type=float, default=0.0)
    s.add_argument("--C", type=float)
    s.add_argument("--mu", type=float)
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("singularity", parents=[common], help="heuristic singular-conjugacy diagnostics")
    s.add_argument("--lambda", dest="lam", type=float)
    s.add_argument("--alpha", type=alpha_arg, help="solve lambda so the rotation number is alpha")
    s.add_argument("--sigma", type=float, default=0.5)
    s.add_argument("--n-max", type=int, default=4096)
    s.add_argument("--quadrature", type=int, default=1024)
    s.add_argument("--orbit", type=int, default=1_000_000)
    s.add_argument("--grid", type=int, default=4096)
    s.add_argument("--mass", type=float, default=0.9)
    s.add_argument("--csv", help="CDF CSV path (x, h)")
    s.set_defaults(func=cmd_singularity)
    return p


def _with_config(parser, argv):
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise UsageError("--config needs a path")
    items = read_config(argv[i + 1])
    rest = argv[:i] + argv[i + 2:]
    command = next((a for a in rest if not a.startswith("-")), None)
    if command is None:
        found = [v for k, v in items if k == "command"]
        if not found:
            raise UsageError("no command given")
        command = found[-1]
        rest = [command] + rest
    items = [(k, v) for k, v in items if k != "command"]
    subparser = parser._subparsers._group_actions[0].choices.get(command)
    if subparser is None:
        raise UsageError(f"unknown command {command!r}")
    pos = rest.index(command) + 1
    return rest[:pos] + _config_tokens(subparser, items) + rest[pos:]


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_with_config(parser, argv))
        if not getattr(args, "func", None):
            raise UsageError("no command given")
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"i/o error: {exc}\n")
        return EXIT_IO
    except BudgetError as exc:
        sys.stderr.write(f"budget exhausted: {exc}\n")
        return EXIT_BUDGET
    except (ValueError, TypeError) as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
