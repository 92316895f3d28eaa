"""Command-line front end.

Exit status: 0 success, 1 domain/validation error, 2 numeric non-convergence,
3 hypothesis violation. Error documents are JSON with a ``reason`` field.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Optional

from . import bounds, hypgeo
from .errors import DomainError, RaylanderError
from .expfield import ExpMap, postsingular, preimage_ladder
from .landing import land_ray
from .rays import ExternalAddress, fundamental_segment
from .verify import SUITES, run_suite

SIG_DIGITS = 15


def round_floats(obj):
    """Round every float to 15 significant digits; non-finite floats become strings."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return str(obj)
        return float(f"{obj:.{SIG_DIGITS}g}")
    if isinstance(obj, dict):
        return {k: round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v) for v in obj]
    return obj


def dumps(doc) -> str:
    return json.dumps(round_floats(doc))


def _table_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([f"{v:.{SIG_DIGITS}g}" if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _lam(args) -> ExpMap:
    return ExpMap(complex(args.lambda_re, args.lambda_im))


def _address(args) -> ExternalAddress:
    return ExternalAddress.parse(args.address, args.period)


def _json_only(args):
    if args.format != "json":
        raise DomainError(f"'{args.command}' emits JSON only", reason="format-unsupported")


def cmd_kappa(args):
    _json_only(args)
    if args.r_n is not None:
        kb = bounds.kappa_annulus(args.r_n, args.delta if args.delta is not None else 0.0)
    elif args.d is not None:
        kb = bounds.kappa_bound(args.d)
    else:
        raise DomainError("kappa needs --d or --r-n", reason="missing-parameter")
    return dumps(kb.to_dict())


def cmd_density(args):
    _json_only(args)
    z = complex(args.re, args.im)
    value = hypgeo.density(args.domain, z)
    return dumps({"domain": args.domain, "z": {"re": z.real, "im": z.imag}, "density": value})


def cmd_dist(args):
    _json_only(args)
    z, w = complex(args.z_re, args.z_im), complex(args.w_re, args.w_im)
    value = hypgeo.distance(args.domain, z, w)
    return dumps({"domain": args.domain, "z": {"re": z.real, "im": z.imag},
                  "w": {"re": w.real, "im": w.imag}, "distance": value})


def cmd_trace(args):
    seg = fundamental_segment(_lam(args), _address(args), args.t, samples=args.samples,
                              tol=args.tol)
    if args.format == "csv":
        return seg.to_csv()
    return dumps(seg.to_dict())


def cmd_land(args):
    _json_only(args)
    m = _lam(args)
    data = postsingular(m, args.max_iter, args.escape_radius)
    cert = land_ray(m, _address(args), args.t0, args.tol, args.max_pullbacks,
                    postsingular_data=data)
    return dumps(cert.to_dict())


def cmd_postsingular(args):
    data = postsingular(_lam(args), args.max_iter, args.escape_radius)
    if args.format == "csv":
        return _table_csv(["n", "re", "im"], [(n, z.real, z.imag) for n, z in enumerate(data.orbit)])
    return dumps(data.to_dict())


def cmd_ladder(args):
    m = _lam(args)
    lad = preimage_ladder(m, complex(args.z0_re, args.z0_im), range(args.j_min, args.j_max + 1),
                          R=args.R)
    if args.format == "csv":
        return _table_csv(["j", "re", "im"], [(j, p.real, p.imag) for j, p in zip(lad.js, lad.points)])
    return dumps(lad.to_dict())


def cmd_verify(args):
    checks = run_suite(args.suite)
    if args.format == "csv":
        text = _table_csv(["suite", "name", "passed", "detail"],
                          [(c.suite, c.name, c.passed, c.detail) for c in checks])
    else:
        text = dumps({"suite": args.suite, "passed": all(c.passed for c in checks),
                      "checks": [c.to_dict() for c in checks]})
    return text, (0 if all(c.passed for c in checks) else 1)


COMMANDS = {
    "kappa": cmd_kappa,
    "density": cmd_density,
    "dist": cmd_dist,
    "trace": cmd_trace,
    "land": cmd_land,
    "postsingular": cmd_postsingular,
    "ladder": cmd_ladder,
    "verify": cmd_verify,
}


class _Parser(argparse.ArgumentParser):
    """Argument errors become validation errors with a JSON document."""

    def error(self, message):
        raise DomainError(message, reason="invalid-arguments")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="raylander",
                     description="Hyperbolic bounds and ray landing for lam*exp(z).")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--output", default=None, help="write the document here instead of stdout")
        return p

    def add_lambda(p):
        p.add_argument("--lambda-re", type=float, required=True)
        p.add_argument("--lambda-im", type=float, default=0.0)

    def add_address(p):
        p.add_argument("--address", required=True, help="comma-separated integers, one period")
        p.add_argument("--period", type=int, default=None)

    p = add("kappa", "contraction bound kappa(d)")
    p.add_argument("--d", type=float)
    p.add_argument("--r-n", type=float, default=None, help="rung radius for the annulus bound")
    p.add_argument("--delta", type=float, default=None)

    domains = [d.value for d in hypgeo.ModelDomain]
    p = add("density", "hyperbolic density on a model domain")
    p.add_argument("--domain", choices=domains, required=True)
    p.add_argument("--re", type=float, required=True)
    p.add_argument("--im", type=float, default=0.0)

    p = add("dist", "hyperbolic distance on a model domain")
    p.add_argument("--domain", choices=domains, required=True)
    for name in ("z", "w"):
        p.add_argument(f"--{name}-re", type=float, required=True)
        p.add_argument(f"--{name}-im", type=float, default=0.0)

    p = add("trace", "sample the fundamental segment g[t, F^k(t)]")
    add_lambda(p)
    add_address(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--samples", type=int, default=2)
    p.add_argument("--tol", type=float, default=1e-10)

    p = add("land", "landing certificate for a periodic ray")
    add_lambda(p)
    add_address(p)
    p.add_argument("--t0", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-pullbacks", type=int, default=200)
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--escape-radius", type=float, default=1e6)

    p = add("postsingular", "orbit of the singular value and its boundedness certificate")
    add_lambda(p)
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--escape-radius", type=float, default=1e6)

    p = add("ladder", "preimage ladder and its tract-chart spacing delta")
    add_lambda(p)
    p.add_argument("--z0-re", type=float, required=True)
    p.add_argument("--z0-im", type=float, default=0.0)
    p.add_argument("--j-min", type=int, default=0)
    p.add_argument("--j-max", type=int, default=10)
    p.add_argument("--R", type=float, default=None)

    p = add("verify", "run property suites")
    p.add_argument("--suite", choices=list(SUITES) + ["all"], default="all")
    return parser


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except DomainError as exc:
        _emit(dumps({"error": str(exc), "reason": exc.reason, "exit_status": 1}), None)
        return 1
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        result = COMMANDS[args.command](args)
    except RaylanderError as exc:
        _emit(dumps({"error": str(exc), "reason": exc.reason, "exit_status": exc.exit_status}),
              args.output)
        return exc.exit_status
    status = 0
    if isinstance(result, tuple):
        result, status = result
    _emit(result, args.output)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
