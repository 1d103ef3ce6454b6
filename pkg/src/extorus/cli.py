"""Command-line front end.

One subcommand per operation family; numbers go out as JSON (default)
or CSV, complex values in the same ``a+bi`` form the parsers accept, so
every emitted value round-trips.  Exit codes: 0 success (for ``verify``,
all asserted checks passed), 1 computation failure, 2 argument error,
3 output I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import fields as dataclass_fields

from .beltrami import BeltramiField, catalog_field, constant, FIELD_CATALOG
from .moduli import (
    CurveClass,
    Modulus,
    cylinder_modulus,
    extremal_length,
    format_complex,
    format_curve,
    hyperbolic_distance,
    kerckhoff_distance,
    levi_form,
    parse_complex,
    parse_curve,
)
from .variation import (
    first_variation,
    identity_eq11_check,
    identity_eq15_evaluate,
    pair_sum_levi,
    second_variation_constant,
    solve_variation_field,
    teich_bound_check,
)
from .verify import ToleranceProfile, format_table, run_suite

import numpy as np


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _tau(text: str) -> Modulus:
    try:
        return Modulus.from_complex(parse_complex(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _curve(text: str) -> CurveClass:
    try:
        return parse_curve(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _complex(text: str) -> complex:
    try:
        return parse_complex(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _range(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected lo:hi:step, got {text!r}")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numeric lo:hi:step, got {text!r}") from None
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError("range needs step > 0 and hi >= lo")
    return lo, hi, step


def _tolerance(text: str) -> tuple[str, float]:
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    known = {f.name for f in dataclass_fields(ToleranceProfile)}
    if key not in known:
        raise argparse.ArgumentTypeError(
            f"unknown tolerance key {key!r}; known: {', '.join(sorted(known))}"
        )
    try:
        return key, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance value must be numeric in {text!r}") from None


def _range_values(spec: tuple[float, float, float]) -> list[float]:
    lo, hi, step = spec
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(count)]


def _add_field_flags(sub: argparse.ArgumentParser) -> None:
    group = sub.add_mutually_exclusive_group(required=True)
    group.add_argument("--mu", type=_complex, help="constant deformation field, a+bi form")
    group.add_argument(
        "--mu-fn",
        choices=sorted(FIELD_CATALOG),
        help="named deformation field from the catalog",
    )
    sub.add_argument(
        "--grid",
        type=int,
        default=64,
        help="samples per side for grid fields, power of two (default 64)",
    )


def _field_from_args(args: argparse.Namespace) -> BeltramiField:
    if args.mu is not None:
        return constant(args.tau, args.mu)
    return catalog_field(args.tau, args.mu_fn, args.grid)


def build_parser() -> _Parser:
    parser = _Parser(prog="extorus", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        sub = subs.add_parser(name, help=help_text)
        sub.add_argument("--out", help="write the result to this path instead of stdout")
        sub.add_argument(
            "--format",
            choices=("json", "csv"),
            default=None,
            help="output format (default json; sweep defaults to csv)",
        )
        return sub

    def add_tau_curve(name: str, help_text: str) -> argparse.ArgumentParser:
        sub = add(name, help_text)
        sub.add_argument("--tau", type=_tau, required=True, help="modulus, a+bi with b > 0")
        sub.add_argument("--curve", type=_curve, required=True, help="curve class, p,q integers")
        return sub

    add_tau_curve("ext", "extremal length and annulus modulus of a curve class")
    add_tau_curve("levi", "mixed second derivative of extremal length at tau")

    sub = add_tau_curve("vary1", "first variation of extremal length along a field")
    _add_field_flags(sub)

    sub = add_tau_curve("vary2", "second variation along a constant field")
    sub.add_argument("--mu", type=_complex, required=True, help="constant field, a+bi form")

    sub = add_tau_curve("pair-sum", "second variations along mu and i*mu, summed")
    sub.add_argument("--mu", type=_complex, required=True, help="constant field, a+bi form")

    sub = add_tau_curve("solve-field", "derivative of the harmonic map along a field")
    _add_field_flags(sub)

    sub = add_tau_curve("eq11", "integration-by-parts check on the solved derivative")
    _add_field_flags(sub)
    sub.add_argument("--tol", type=_tolerance, action="append", default=[],
                     help="tolerance override, key=value (key: spectral_tol)")

    sub = add_tau_curve("eq15", "paired-direction gradient identity, evaluated")
    _add_field_flags(sub)
    sub.add_argument("--tol", type=_tolerance, action="append", default=[],
                     help="tolerance override, key=value (key: exact_tol)")

    sub = add("distance", "stretch-factor distance between two moduli")
    sub.add_argument("--tau", type=_tau, required=True, help="first modulus, a+bi")
    sub.add_argument("--tau2", type=_tau, required=True, help="second modulus, a+bi")
    sub.add_argument("--max-pq", type=int, default=50,
                     help="curve search bound |p|,|q| <= N (default 50)")

    sub = add_tau_curve("bound", "convexity floor along a unit stretch line")
    sub.add_argument("--mu", type=_complex, required=True, help="direction with |mu| = 1")
    sub.add_argument("--step", type=float, default=1e-3,
                     help="second-difference step, in (0, 1e-2] (default 1e-3)")
    sub.add_argument("--tol", type=_tolerance, action="append", default=[],
                     help="tolerance override, key=value (key: rel_tol_first)")

    sub = add("sweep", "extremal length and Levi form over a rectangle of moduli")
    sub.add_argument("--curve", type=_curve, required=True, help="curve class, p,q integers")
    sub.add_argument("--re", type=_range, required=True, help="real range lo:hi:step")
    sub.add_argument("--im", type=_range, required=True, help="imaginary range lo:hi:step, lo > 0")

    sub = add("verify", "run the full cross-check suite")
    sub.add_argument("--seed", type=int, default=42, help="sampling seed (default 42)")
    sub.add_argument("--tol", type=_tolerance, action="append", default=[],
                     help="profile override, key=value, repeatable")

    return parser


def _profile(args: argparse.Namespace) -> ToleranceProfile:
    return ToleranceProfile().merged(dict(args.tol))


def _json_text(payload) -> str:
    return json.dumps(payload, indent=2)


def _csv_text(payload: dict) -> str:
    def cell(v) -> str:
        if isinstance(v, float):
            return f"{v:.17g}"
        return str(v)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(payload))
    writer.writerow([cell(v) for v in payload.values()])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> int:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return 0
    try:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"extorus: cannot write {out}: {exc}", file=sys.stderr)
        return 3
    return 0


def _report_payload(report) -> dict:
    data = report.to_json()
    if data["rhs"] != 0.0:
        data["ratio"] = data["lhs"] / data["rhs"]
    return data


def _run(args: argparse.Namespace) -> int:
    cmd = args.command

    if cmd == "sweep":
        res = _range_values(args.re)
        ims = _range_values(args.im)
        rows = []
        for im in ims:
            for re in res:
                tau = Modulus(re, im)
                rows.append((re, im, extremal_length(tau, args.curve), levi_form(tau, args.curve)))
        if args.format == "json":
            payload = [dict(zip(("re", "im", "ext", "levi"), r)) for r in rows]
            return _emit(_json_text(payload), args.out)
        lines = ["re,im,ext,levi"]
        lines += [",".join(f"{v:.17g}" for v in row) for row in rows]
        return _emit("\n".join(lines) + "\n", args.out)

    if cmd == "verify":
        result = run_suite(_profile(args), args.seed)
        if args.out is not None:
            code = _emit(result.to_json_text(), args.out)
            if code != 0:
                return code
            print(format_table(result))
        elif args.format == "json":
            print(result.to_json_text())
        else:
            print(format_table(result))
        return 0 if result.all_passed else 1

    if cmd == "ext":
        v = extremal_length(args.tau, args.curve)
        payload = {
            "tau": format_complex(args.tau.value),
            "curve": format_curve(args.curve),
            "ext": v,
            "cylinder_modulus": cylinder_modulus(args.tau, args.curve),
        }
    elif cmd == "levi":
        payload = {
            "tau": format_complex(args.tau.value),
            "curve": format_curve(args.curve),
            "levi": levi_form(args.tau, args.curve),
        }
    elif cmd == "vary1":
        field = _field_from_args(args)
        payload = {
            "tau": format_complex(args.tau.value),
            "curve": format_curve(args.curve),
            "mu": format_complex(args.mu) if args.mu is not None else args.mu_fn,
            "first_variation": first_variation(args.tau, args.curve, field),
        }
    elif cmd == "vary2":
        payload = {
            "tau": format_complex(args.tau.value),
            "curve": format_curve(args.curve),
            "mu": format_complex(args.mu),
            "second_variation": second_variation_constant(args.tau, args.curve, args.mu),
        }
    elif cmd == "pair-sum":
        ps = pair_sum_levi(args.tau, args.curve, args.mu)
        payload = {
            "tau": format_complex(args.tau.value),
            "curve": format_curve(args.curve),
            "mu": format_complex(args.mu),
            "pair_sum": ps,
            "positive": ps > 0.0,
        }
    elif cmd == "solve-field":
        field = _field_from_args(args)
        n = max(args.grid, 4)
        vf = solve_variation_field(args.tau, args.curve, field, n)
        payload = {
            "tau": format_complex(args.tau.value),
            "curve": format_curve(args.curve),
            "n": vf.n,
            "affine_b": format_complex(vf.affine_b),
            "affine_c": format_complex(vf.affine_c),
            "periodic_sup": float(np.abs(vf.periodic).max()),
            "gradient_sup": float(np.abs(vf.gradient).max()),
            "residual": vf.residual,
            "source_sup": vf.source_sup,
        }
    elif cmd == "eq11":
        profile = _profile(args)
        report = identity_eq11_check(
            args.tau, args.curve, _field_from_args(args), args.grid, profile.spectral_tol
        )
        payload = _report_payload(report)
    elif cmd == "eq15":
        profile = _profile(args)
        report = identity_eq15_evaluate(
            args.tau, args.curve, _field_from_args(args), args.grid, profile.exact_tol
        )
        payload = _report_payload(report)
    elif cmd == "distance":
        kd = kerckhoff_distance(args.tau, args.tau2, args.max_pq)
        hyp = hyperbolic_distance(args.tau, args.tau2)
        payload = {
            "tau": format_complex(args.tau.value),
            "tau2": format_complex(args.tau2.value),
            "max_pq": args.max_pq,
            "kerckhoff": kd.value,
            "maximizer": format_curve(kd.maximizer),
            "hyperbolic": hyp,
            "half_hyperbolic": 0.5 * hyp,
        }
    elif cmd == "bound":
        profile = _profile(args)
        report = teich_bound_check(
            args.tau, args.curve, args.mu, args.step, profile.rel_tol_first
        )
        payload = _report_payload(report)
        payload["ext"] = extremal_length(args.tau, args.curve)
    else:  # pragma: no cover - argparse enforces the command set
        raise AssertionError(cmd)

    text = _csv_text(payload) if args.format == "csv" else _json_text(payload)
    return _emit(text, args.out)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _run(args)
    except (ValueError, ArithmeticError) as exc:
        print(f"extorus: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"extorus: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
