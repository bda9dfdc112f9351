"""Command-line front end.

Thin wrappers over the library: parse JSON set descriptions, dispatch
one computation, write CSV/JSON output atomically, and print a single
summary line ``<command> value=<v> err=<e>``.

Exit codes: 0 success, 1 numerical failure, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

from . import asymptotics, sets, spectral
from .errors import GfpError, SingularInputError
from .interaction import Budget, j_lambda, perimeter
from .mehler import QuadratureSpec, kernel_K


def _workers(args) -> int:
    if args.workers is not None:
        return args.workers
    env = os.environ.get("GFP_WORKERS")
    return int(env) if env else 1


def _load_set(path: str) -> tuple[sets.SetExpr, int]:
    with open(path) as fh:
        return sets.set_from_json(fh.read())


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".gfp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, text: str) -> None:
    if args.out:
        _atomic_write(args.out, text)


def _summary(command: str, value: float, err: float) -> None:
    print(f"{command} value={value!r} err={err!r}")


def _spec(args) -> QuadratureSpec:
    if args.tol is not None:
        return QuadratureSpec(rel_tol=args.tol)
    return QuadratureSpec()


def _budget(args) -> Budget | None:
    return Budget(max_evals=args.budget) if args.budget else None


def _s_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_kernel(args, parser) -> int:
    if not 0 < args.sigma < 2:
        parser.error("--sigma must lie in (0, 2)")
    x = [float(t) for t in args.x.split(",")]
    y = [float(t) for t in args.y.split(",")]
    kv = kernel_K(args.sigma, x, y, spec=_spec(args))
    _emit(args, json.dumps({"value": kv.value, "error": kv.error_bound}))
    _summary("kernel", kv.value, kv.error_bound)
    return 0


def _cmd_perimeter(args, parser) -> int:
    e, dim = _load_set(args.set)
    omega, odim = (_load_set(args.omega) if args.omega
                   else (sets.FullSpace(), dim))
    if odim != dim:
        parser.error("E and Omega dimensions differ")
    if not 0 < args.s < 1:
        parser.error("--s must lie in (0, 1)")
    est = perimeter(e, omega, args.s, spec=_spec(args),
                                budget=_budget(args), seed=args.seed,
                                dim=dim).total
    if args.format == "json":
        _emit(args, json.dumps({"s": args.s, "value": est.value,
                                "error": est.error, "method": est.method}))
    else:
        _emit(args, "s,value,error,method\n"
              f"{args.s!r},{est.value!r},{est.error!r},{est.method}\n")
    _summary("perimeter", est.value, est.error)
    return 0


def _cmd_jlambda(args, parser) -> int:
    e, dim = _load_set(args.set)
    omega, odim = (_load_set(args.omega) if args.omega
                   else (sets.FullSpace(), dim))
    if odim != dim:
        parser.error("E and Omega dimensions differ")
    if not 0 < args.s < 1:
        parser.error("--s must lie in (0, 1)")
    est = j_lambda(e, omega, args.s, budget=_budget(args), dim=dim).total
    if args.format == "json":
        _emit(args, json.dumps({"s": args.s, "value": est.value,
                                "error": est.error, "method": est.method}))
    else:
        _emit(args, "s,value,error,method\n"
              f"{args.s!r},{est.value!r},{est.error!r},{est.method}\n")
    _summary("jlambda", est.value, est.error)
    return 0


def _cmd_sweep(args, parser) -> int:
    e, dim = _load_set(args.set)
    omega, odim = (_load_set(args.omega) if args.omega
                   else (sets.FullSpace(), dim))
    if odim != dim:
        parser.error("E and Omega dimensions differ")
    s_list = (_s_list(args.s_list) if args.s_list
              else [2.0 ** -k for k in range(1, 9)])
    if any(not 0 < s < 1 for s in s_list):
        parser.error("--s-list values must lie in (0, 1)")
    result = asymptotics.sweep(e, omega, s_list, spec=_spec(args),
                               budget=_budget(args), seed=args.seed, dim=dim)
    if args.format == "json":
        _emit(args, result.to_json())
    else:
        fit = (f"# fit a={result.fit_coefficients[0]!r}"
               f" b={result.fit_coefficients[1]!r}"
               f" c={result.fit_coefficients[2]!r}"
               f" residual={result.fit_residual!r}\n")
        _emit(args, result.to_csv() + fit)
    _summary("sweep", result.extrapolated_limit, result.uncertainty)
    return 0


def _cmd_limit(args, parser) -> int:
    e, dim = _load_set(args.set)
    omega, odim = (_load_set(args.omega) if args.omega
                   else (sets.FullSpace(), dim))
    if odim != dim:
        parser.error("E and Omega dimensions differ")
    lv = asymptotics.mu_limit(e, omega, dim=dim, seed=args.seed)
    _emit(args, json.dumps({"mu": lv.mu, "error": lv.error,
                            "method": lv.method}))
    _summary("limit", lv.mu, lv.error)
    return 0


def _cmd_spectral(args, parser) -> int:
    if not 0 < args.s < 1:
        parser.error("--s must lie in (0, 1)")
    if args.u == "chi":
        if not args.set:
            parser.error("--u chi requires --set")
        e, dim = _load_set(args.set)
        if dim != 1:
            parser.error("spectral expansion supports N = 1")
        exp = spectral.expand(e, args.degree)
    elif args.u.startswith("h"):
        n = int(args.u[1:])
        exp = spectral.HermiteExpansion.from_coefficients({(n,): 1.0}, 1)
    else:
        parser.error("--u must be 'chi' or 'h<n>'")
    sn = spectral.spectral_seminorm_sq(exp, args.s)
    _emit(args, json.dumps({"s": args.s, "value": sn.value,
                            "truncation": sn.truncation,
                            "ms_limit": spectral.ms_limit(exp)}))
    _summary("spectral", sn.value, sn.truncation)
    return 0


def _cmd_example(args, parser) -> int:
    if not 0 < args.s < 1:
        parser.error("--s must lie in (0, 1)")
    if args.pairs < 2:
        parser.error("--pairs must be at least 2")
    ex = asymptotics.divergent_example(args.pairs, args.s)
    _emit(args, json.dumps({"s": ex.s, "pairs": ex.pairs,
                            "total_length": ex.total_length,
                            "lower_bound": ex.lower_bound}))
    _summary("example", ex.lower_bound, 0.0)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_common(sp) -> None:
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget", type=int, default=None)
    sp.add_argument("--out", default=None)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--workers", type=int, default=None)
    sp.add_argument("--tol", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gfp",
        description="Fractional Gaussian perimeters and their small-s limits",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel", help="subordinated Mehler kernel at a pair")
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--x", required=True, help="comma-separated coordinates")
    p.add_argument("--y", required=True, help="comma-separated coordinates")
    _add_common(p)
    p.set_defaults(run=_cmd_kernel)

    for name, fn, helptext in (
        ("perimeter", _cmd_perimeter, "fractional Gaussian perimeter"),
        ("jlambda", _cmd_jlambda, "Lebesgue-kernel Gaussian functional"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--set", required=True, help="E as JSON file")
        p.add_argument("--omega", default=None, help="Omega as JSON file")
        p.add_argument("--s", type=float, required=True)
        _add_common(p)
        p.set_defaults(run=fn)

    p = sub.add_parser("sweep", help="s * perimeter sweep with extrapolation")
    p.add_argument("--set", required=True)
    p.add_argument("--omega", default=None)
    p.add_argument("--s-list", default=None,
                   help="comma-separated decreasing s values")
    _add_common(p)
    p.set_defaults(run=_cmd_sweep)

    p = sub.add_parser("limit", help="closed-form small-s limit mu")
    p.add_argument("--set", required=True)
    p.add_argument("--omega", default=None)
    _add_common(p)
    p.set_defaults(run=_cmd_limit)

    p = sub.add_parser("spectral", help="Hermite spectral seminorm")
    p.add_argument("--u", default="chi", help="'chi' (uses --set) or 'h<n>'")
    p.add_argument("--set", default=None)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--degree", type=int, default=10 ** 5)
    _add_common(p)
    p.set_defaults(run=_cmd_spectral)

    p = sub.add_parser("example", help="divergent-perimeter lower bound")
    p.add_argument("--pairs", type=int, required=True)
    p.add_argument("--s", type=float, required=True)
    _add_common(p)
    p.set_defaults(run=_cmd_example)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    os.environ.setdefault("GFP_WORKERS", "1")
    _ = _workers(args)
    try:
        return args.run(args, parser)
    except SingularInputError as exc:
        print(f"error: singular input: {exc}", file=sys.stderr)
        return 2
    except (json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GfpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
