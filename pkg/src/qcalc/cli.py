"""``qcalc`` command line: eval, verify and sweep.

Parameters are passed as ``--name value`` pairs after the subcommand, e.g.
``qcalc eval beta_q --t 0.5 --s 1.5 --q 0.3``.  Rationals may be written as
``p/q``; exact mode never routes them through floating point.  Exit codes:
0 success, 1 an identity check failed, 2 usage or domain error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Callable

from qcalc import __version__
from qcalc.calculus import jackson_improper, jackson_integral, jackson_interval
from qcalc.context import Mode, QContext, as_integer, make_context
from qcalc.errors import QCalcError
from qcalc.expr import ExpressionError, compile_expression
from qcalc.identities import VERIFIERS, Backend, IdentityId
from qcalc.pochhammer import poch_finite, poch_inf, poch_real
from qcalc.report import GridError, GridSpec, ReportDocument, rows_to_csv
from qcalc.special import (E_q, beta_q, e_q, gamma_q, k_function, little_beta, little_gamma)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _fmt(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


# -- eval registry -----------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class Evaluator:
    required: tuple[str, ...]
    optional: tuple[str, ...]
    run: Callable[[QContext, dict], tuple[object, dict]]
    text_params: tuple[str, ...] = ()


def _eval_gamma(ctx, p):
    res = gamma_q(ctx, p["t"], p.get("representation", "product"), p.get("A", 1))
    return res.value, {"representation": res.representation.value, "A": res.A_used, **res.meta}


def _eval_beta(ctx, p):
    res = beta_q(ctx, p["t"], p["s"], p.get("representation", "gamma_ratio"), p.get("A", 1))
    return res.value, {"representation": res.representation.value, "A": res.A_used, **res.meta}


def _eval_little_gamma(ctx, p):
    value = little_gamma(ctx, p["t"], p["A"])
    return value, {"K_corrected": k_function(ctx, p["A"], p["t"]).value * value}


def _eval_little_beta(ctx, p):
    value = little_beta(ctx, p["t"], p["s"], p["A"])
    return value, {"K_corrected": k_function(ctx, p["A"], p["t"]).value * value}


def _eval_poch(ctx, p):
    if "n" in p and "t" in p:
        raise UsageError("poch takes --n (integer) or --t (real), not both")
    if "n" in p:
        n = as_integer(p["n"])
        if n is None:
            raise UsageError(f"--n must be an integer, got {p['n']}")
        if "b" in p:
            return poch_finite(ctx, p["a"], p["b"], n), {"form": "(a+b)_q^n"}
        return poch_finite(ctx, 1, p["a"], n), {"form": "(1+a)_q^n"}
    if "b" in p:
        raise UsageError("--b needs an integer exponent --n")
    if "t" not in p:
        return poch_inf(ctx, p["a"]).value, {"form": "(1+a)_q^oo"}
    return poch_real(ctx, p["a"], p["t"]), {"form": "(1+a)_q^t"}


def _eval_jackson(ctx, p):
    f = compile_expression(ctx, p["f"])
    if "b" in p:
        return jackson_interval(ctx, f, p["a"], p["b"]), {"limits": f"{p['a']}..{p['b']}"}
    res = jackson_integral(ctx, f, p["a"])
    return res.value, res.meta()


def _eval_improper(ctx, p):
    res = jackson_improper(ctx, compile_expression(ctx, p["f"]), p["A"])
    return res.value, {"A": res.A, **res.meta()}


EVALUATORS: dict[str, Evaluator] = {
    "gamma_q": Evaluator(("t",), ("representation", "A"), _eval_gamma, ("representation",)),
    "beta_q": Evaluator(("t", "s"), ("representation", "A"), _eval_beta, ("representation",)),
    "little_gamma": Evaluator(("t", "A"), (), _eval_little_gamma),
    "little_beta": Evaluator(("t", "s", "A"), (), _eval_little_beta),
    "K": Evaluator(("x", "t"), (), lambda ctx, p: (k_function(ctx, p["x"], p["t"]).value, {})),
    "e_q": Evaluator(("x",), (), lambda ctx, p: (e_q(ctx, p["x"]), {})),
    "E_q": Evaluator(("x",), (), lambda ctx, p: (E_q(ctx, p["x"]), {})),
    "poch": Evaluator(("a",), ("t", "b", "n"), _eval_poch),
    "jackson": Evaluator(("f", "a"), ("b",), _eval_jackson, ("f",)),
    "improper": Evaluator(("f", "A"), (), _eval_improper, ("f",)),
}


def _check_params(name: str, params: dict, required, optional) -> None:
    missing = [k for k in required if k not in params]
    if missing:
        raise UsageError(f"{name} needs --{' --'.join(missing)}")
    unknown = [k for k in params if k not in required and k not in optional]
    if unknown:
        raise UsageError(f"{name} does not take --{' --'.join(unknown)}")


def _convert(ctx: QContext, params: dict, text_params=()) -> dict:
    out = {}
    for key, raw in params.items():
        if key in text_params:
            out[key] = raw
        else:
            try:
                out[key] = ctx.num(Fraction(raw))
            except (ValueError, ZeroDivisionError) as exc:
                raise UsageError(f"--{key}: not a number: {raw!r}") from exc
    return out


def run_eval(fn: str, params: dict, ctx: QContext) -> tuple[object, dict]:
    if fn not in EVALUATORS:
        raise UsageError(f"unknown function {fn!r}; choose from {', '.join(EVALUATORS)}")
    spec = EVALUATORS[fn]
    _check_params(fn, params, spec.required, spec.optional)
    return spec.run(ctx, _convert(ctx, params, spec.text_params))


# -- verify ------------------------------------------------------------------

VERIFY_PARAMS: dict[IdentityId, tuple[tuple[str, ...], tuple[str, ...]]] = {
    IdentityId.JACOBI_CLASSICAL: (("x",), ()),
    IdentityId.JACOBI_FAMILY: (("x", "A"), ()),
    IdentityId.RAMANUJAN: (("a", "b", "x"), ()),
    IdentityId.SYMMETRIC_BILATERAL: (("a", "b", "c"), ()),
    IdentityId.TRANSLATION_INVARIANCE: (("alpha", "beta", "A"), ()),
    IdentityId.GAMMA_REPRESENTATIONS: (("t",), ("A",)),
    IdentityId.BETA_REPRESENTATIONS: (("t", "s"), ("A",)),
}
_KEYWORDS = {"alpha": "alpha_exp", "beta": "beta_exp"}
SERIES_IDENTITIES = (IdentityId.JACOBI_CLASSICAL, IdentityId.JACOBI_FAMILY,
                     IdentityId.RAMANUJAN, IdentityId.SYMMETRIC_BILATERAL)


def _identity_param(raw: str, backend: Backend):
    """Rationals and decimals become numbers; anything else is left as a monomial like ``q^2/3``."""
    try:
        value = Fraction(raw)
    except (ValueError, ZeroDivisionError):
        return raw
    return value if backend is Backend.EXACT else float(value)


def verify_point(identity: IdentityId, point: dict, backend: Backend, tol: float, cap: int,
                 window: int | None) -> dict:
    point = dict(point)
    q = point.pop("q")
    base = {"identity": identity.value, "backend": backend.value, "q": q, **point}
    try:
        overrides = {"bilateral_window": window} if window else {}
        ctx = make_context(q, **overrides)
        args = {_KEYWORDS.get(k, k): _identity_param(v, backend) for k, v in point.items()}
        kwargs = {"tol": tol}
        if identity in SERIES_IDENTITIES:
            kwargs.update(backend=backend, cap=cap)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            report = VERIFIERS[identity](ctx, **args, **kwargs)
    except (QCalcError, ValueError, ZeroDivisionError) as exc:
        return {**base, "status": "skip", "reason": f"{type(exc).__name__}: {exc}"}
    row = {**base, **{k: v for k, v in report.as_row().items() if k not in base}}
    if caught:
        row["warnings"] = "; ".join(sorted({str(w.message) for w in caught}))
    return row


def _points(grid_text: str | None, params: dict, default_q: str) -> list[dict]:
    if grid_text is None:
        return [{"q": default_q, **params}]
    points = GridSpec.parse(grid_text).points()
    return [{"q": default_q, **params, **p} for p in points]


def cmd_verify(args, params: dict) -> int:
    try:
        identity = IdentityId(args.identity)
    except ValueError:
        raise UsageError(f"unknown identity {args.identity!r}; choose from "
                         f"{', '.join(i.value for i in IdentityId)}") from None
    backend = Backend(args.backend)
    if backend is Backend.EXACT and identity not in SERIES_IDENTITIES:
        raise UsageError(f"{identity.value} has no exact-series backend")
    points = _points(args.grid, params, args.q)
    required, optional = VERIFY_PARAMS[identity]
    for point in points:
        _check_params(identity.value, {k: v for k, v in point.items() if k != "q"}, required, optional)
    _check_out(args.out)
    rows = [verify_point(identity, p, backend, args.tol, args.cap, args.window) for p in points]
    doc = ReportDocument(__version__, {"q": args.q, "backend": backend.value, "order_cap": args.cap,
                                       "bilateral_window": args.window, "tol": args.tol}, rows)
    _emit(doc, args.out)
    counts = doc.summary
    print(f"pass={counts['pass']} fail={counts['fail']} skip={counts['skip']}", file=sys.stderr)
    return EXIT_FAIL if counts["fail"] else EXIT_OK


def _check_out(out: str | None) -> None:
    if out is not None and Path(out).suffix not in (".csv", ".json"):
        raise UsageError("--out must end in .csv or .json")


def _emit(doc: ReportDocument, out: str | None, header: list[str] | None = None) -> None:
    if out is None:
        sys.stdout.write(rows_to_csv(doc.rows, header))
    elif out.endswith(".json"):
        doc.write(out)
    else:
        Path(out).write_text(rows_to_csv(doc.rows, header), encoding="utf-8", newline="")


# -- sweep -------------------------------------------------------------------

def sweep_point(task: tuple) -> dict:
    fn, point, mode, cap = task
    point = dict(point)
    q = point.pop("q")
    row: dict = {"q": q, **point}
    try:
        ctx = _context(q, mode, cap)
        value, meta = run_eval(fn, point, ctx)
    except (QCalcError, ExpressionError, UsageError, ValueError, ZeroDivisionError) as exc:
        return {**row, "value": "", "status": "skip", "reason": f"{type(exc).__name__}: {exc}"}
    row.update(value=_fmt(value), status="pass")
    for key, extra in meta.items():
        row[key] = _fmt(extra) if not isinstance(extra, (dict, list)) else json.dumps(extra, default=str)
    return row


def cmd_sweep(args, params: dict) -> int:
    if args.fn not in EVALUATORS:
        raise UsageError(f"unknown function {args.fn!r}; choose from {', '.join(EVALUATORS)}")
    _check_out(args.out)
    grid = GridSpec.parse(args.grid)
    points = [{"q": args.q, **params, **p} for p in grid.points()]
    tasks = [(args.fn, p, args.mode, args.cap) for p in points]
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(sweep_point, tasks))
    else:
        rows = [sweep_point(t) for t in tasks]
    header = ["q", *params, *(n for n in grid.names if n != "q" and n not in params), "value", "status"]
    doc = ReportDocument(__version__, {"q": args.q, "mode": args.mode, "cap": args.cap}, rows)
    _emit(doc, args.out, header)
    return EXIT_OK


# -- eval --------------------------------------------------------------------

def _context(q: str, mode: str, cap: int | None) -> QContext:
    overrides = {"product_terms": cap, "series_terms": cap} if cap else {}
    return make_context(q, mode, **overrides)


def cmd_eval(args, params: dict) -> int:
    ctx = _context(args.q, args.mode, args.cap)
    value, meta = run_eval(args.fn, params, ctx)
    if args.json:
        print(json.dumps({"function": args.fn, "params": params, "value": _fmt(value),
                          "context": ctx.echo(), "meta": meta}, indent=2, default=str))
    else:
        print(_fmt(value))
        for key, extra in meta.items():
            if extra is not None:
                print(f"# {key}: {_fmt(extra)}")
    return EXIT_OK


# -- argument handling -------------------------------------------------------

def _extra_params(extra: list[str]) -> dict[str, str]:
    params: dict[str, str] = {}
    items = iter(extra)
    for item in items:
        if not item.startswith("--") or len(item) < 3:
            raise UsageError(f"unexpected argument {item!r}")
        name, sep, value = item[2:].partition("=")
        if not sep:
            value = next(items, None)
            if value is None:
                raise UsageError(f"--{name} needs a value")
        params[name] = value
    return params


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcalc", description=__doc__.splitlines()[0], allow_abbrev=False)
    parser.add_argument("--version", action="version", version=f"qcalc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument("--q", default="0.5", help="base q in (0, 1), decimal or p/q (default 0.5)")

    p_eval = sub.add_parser("eval", parents=[common], allow_abbrev=False, help="evaluate one function")
    p_eval.add_argument("fn", help=", ".join(EVALUATORS))
    p_eval.add_argument("--mode", choices=[m.value for m in Mode], default="float")
    p_eval.add_argument("--cap", type=int, help="product/series truncation cap")
    p_eval.add_argument("--json", action="store_true", help="print a JSON record")
    p_eval.set_defaults(handler=cmd_eval)

    p_verify = sub.add_parser("verify", parents=[common], allow_abbrev=False, help="check an identity")
    p_verify.add_argument("identity", help=", ".join(i.value for i in IdentityId))
    p_verify.add_argument("--grid", help='e.g. "q=0.1,0.5; t=0.3:2.5:5"')
    p_verify.add_argument("--backend", choices=[b.value for b in Backend], default="float")
    p_verify.add_argument("--out", help="report file (.csv or .json); CSV on stdout otherwise")
    p_verify.add_argument("--tol", type=float, default=1e-10)
    p_verify.add_argument("--cap", type=int, default=40, help="q-order cap of the exact backend")
    p_verify.add_argument("--window", type=int, help="bilateral window W of the float backend")
    p_verify.set_defaults(handler=cmd_verify)

    p_sweep = sub.add_parser("sweep", parents=[common], allow_abbrev=False, help="tabulate a function over a grid")
    p_sweep.add_argument("fn", help=", ".join(EVALUATORS))
    p_sweep.add_argument("--grid", required=True)
    p_sweep.add_argument("--out", help="table file (.csv or .json); CSV on stdout otherwise")
    p_sweep.add_argument("--mode", choices=[m.value for m in Mode], default="float")
    p_sweep.add_argument("--cap", type=int)
    p_sweep.add_argument("--jobs", type=int, default=1, help="worker processes")
    p_sweep.set_defaults(handler=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    try:
        return args.handler(args, _extra_params(extra))
    except (UsageError, GridError, ExpressionError) as exc:
        print(f"qcalc: usage error: {exc}", file=sys.stderr)
    except QCalcError as exc:
        print(f"qcalc: {type(exc).__name__}: {exc}", file=sys.stderr)
    except (ValueError, ZeroDivisionError) as exc:
        print(f"qcalc: error: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
