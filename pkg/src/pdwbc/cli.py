"""Command-line front end: ``pdwbc z``, ``pdwbc verify`` and ``pdwbc sweep``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from importlib import metadata

import mpmath

from . import asymptotics as asy
from .ik_determinant import Z_det
from .lattice import ModelParams, partition_transfer
from .orthopoly import Z_op
from .scalar import DEFAULT_PRECISION, DomainError, format_rational, parse_rational
from .verify import CHECKS, SuiteConfig, run_checks

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_MISMATCH = 2
EXIT_USAGE = 64

ROUTES = {
    "transfer": lambda n, m, p: partition_transfer(n, m, p.weights()),
    "det": Z_det,
    "op": Z_op,
}


def version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0.0.0"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass
class Report:
    command: str
    params: dict
    results: list = field(default_factory=list)
    version: str = field(default_factory=version)

    def add(self, name: str, value, status: str = "ok", detail: str = ""):
        self.results.append({"name": name, "value": value, "status": status, "detail": detail})

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=False)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        d = json.loads(text)
        return cls(d["command"], d["params"], d["results"], d["version"])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["name", "value", "status", "detail"])
        for r in self.results:
            w.writerow([r["name"], r["value"], r["status"], r["detail"]])
        return buf.getvalue()


def _params_dict(args) -> dict:
    return {"T": format_rational(args.T), "G": format_rational(args.G),
            "n": getattr(args, "n", None), "m": getattr(args, "m", None)}


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _decimal(x: Fraction, prec: int) -> str:
    with mpmath.workprec(prec):
        return mpmath.nstr(mpmath.mpf(x.numerator) / x.denominator, 30)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_z(args, p: ModelParams) -> tuple[Report, int]:
    n, m = args.n, args.m
    if n is None or m is None:
        raise UsageError("z needs --n and --m")
    if not (0 <= m < n):
        raise UsageError(f"need 0 <= m < n, got n={n}, m={m}")
    routes = list(ROUTES) if args.route == "all" else [args.route]
    rep = Report("z", _params_dict(args))
    values = {}
    for r in routes:
        values[r] = ROUTES[r](n, m, p)
    distinct = set(values.values())
    code = EXIT_OK
    for r, v in values.items():
        status = "ok" if len(distinct) == 1 else "mismatch"
        rep.add(f"Z[{r}]", format_rational(v), status, _decimal(v, args.precision))
    if len(distinct) != 1:
        first = routes[0]
        diffs = [f"{r}-{first}={format_rational(values[r] - values[first])}" for r in routes[1:]]
        rep.add("diff", "", "mismatch", "; ".join(diffs))
        code = EXIT_MISMATCH
    return rep, code


def cmd_verify(args, p: ModelParams) -> tuple[Report, int]:
    names = args.check or list(CHECKS)
    unknown = [c for c in names if c not in CHECKS]
    if unknown:
        raise UsageError(f"unknown check(s): {', '.join(unknown)}; choose from {', '.join(CHECKS)}")
    cfg = SuiteConfig(p, n=args.n, seed=args.seed, eps=args.eps, precision=args.precision)
    rep = Report("verify", _params_dict(args))
    failed = []
    for res in run_checks(cfg, names):
        rep.add(res.name, res.value, res.status, res.detail)
        if res.status != "pass":
            failed.append(res.name)
    if failed:
        print(f"failing checks: {', '.join(failed)}", file=sys.stderr)
    return rep, EXIT_CHECK_FAILED if failed else EXIT_OK


def m_rule(spec: str):
    """'half' -> n//2, 'zero' -> 0, 'const:K' -> K, 'frac:p/q' -> round(n p/q)."""
    if spec == "half":
        return lambda n: n // 2
    if spec == "zero":
        return lambda n: 0
    kind, _, arg = spec.partition(":")
    if kind == "const" and arg.isdigit():
        k = int(arg)
        return lambda n: k
    if kind == "frac":
        r = parse_rational(arg)
        return lambda n: round(n * r)
    raise UsageError(f"bad m rule {spec!r}")


def parse_range(text: str) -> range:
    lo, sep, hi = text.partition(":")
    try:
        lo_i = int(lo)
        hi_i = int(hi) if sep else lo_i
    except ValueError:
        raise UsageError(f"bad range {text!r}; expected LO:HI") from None
    return range(lo_i, hi_i + 1)


SWEEP_COLUMNS = ["n", "m", "Z", "Z_meixner", "C_m", "xi_nm", "envelope", "free_energy_n", "free_energy"]


def sweep_row(n: int, m: int, p: ModelParams, eps, prec: int) -> dict:
    rep = asy.theorem_check(n, m, p, eps, prec=prec)
    with mpmath.workprec(prec):
        return {
            "n": n, "m": m,
            "Z": format_rational(rep.Z_exact),
            "Z_meixner": format_rational(rep.Z_meixner),
            "C_m": format_rational(rep.C_m),
            "xi_nm": mpmath.nstr(rep.xi_nm, 20),
            "envelope": mpmath.nstr(rep.bound_envelope, 20),
            "free_energy_n": mpmath.nstr(asy.finite_size_free_energy(n, m, p, prec), 20),
            "free_energy": mpmath.nstr(asy.free_energy(Fraction(n - m, n), p, prec), 20),
        }


def cmd_sweep(args, p: ModelParams) -> tuple[list[dict], int]:
    rule = m_rule(args.m_rule)
    pairs = []
    for n in parse_range(args.n_range):
        m = rule(n)
        if n >= 1 and 0 <= m < n:
            pairs.append((n, m))
    if args.jobs > 1 and pairs:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(args.jobs) as ex:
            rows = list(ex.map(sweep_row, *zip(*pairs), [p] * len(pairs),
                               [args.envelope_eps] * len(pairs), [args.precision] * len(pairs)))
    else:
        rows = [sweep_row(n, m, p, args.envelope_eps, args.precision) for n, m in pairs]
    rows.sort(key=lambda r: (r["n"], r["m"]))
    return rows, EXIT_OK


def sweep_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, SWEEP_COLUMNS, lineterminator="\r\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"expected a rational like 5/4, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--T", type=_rational_arg, default=Fraction(2), help="e^t as num/den")
    common.add_argument("--G", type=_rational_arg, default=Fraction(5, 4), help="e^gamma as num/den")
    common.add_argument("--precision", type=int, default=None,
                        help="BigFloat bits (overrides PDWBC_PRECISION)")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--output", default=None, help="write here instead of stdout")
    common.add_argument("--seed", type=int, default=20240601)

    parser = _Parser(prog="pdwbc", description="Six-vertex model with partial domain wall boundary")
    parser.add_argument("--version", action="version", version=version())
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    z = sub.add_parser("z", parents=[common], help="partition function by one or all routes")
    z.add_argument("--n", type=int, required=True)
    z.add_argument("--m", type=int, required=True)
    z.add_argument("--route", choices=[*ROUTES, "all"], default="all")

    v = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    v.add_argument("--check", action="append", help=f"one of {', '.join(CHECKS)}; repeatable")
    v.add_argument("--n", type=int, default=None, help="lattice size for size-driven checks")
    v.add_argument("--eps", default="1e-4", help="Toda step")

    s = sub.add_parser("sweep", parents=[common], help="asymptotic table over a range of n")
    s.add_argument("--n-range", default="6:14", help="LO:HI inclusive")
    s.add_argument("--m-rule", default="half", help="half | zero | const:K | frac:p/q")
    s.add_argument("--envelope-eps", default="0.5", help="epsilon in the xi envelope")
    s.add_argument("--jobs", type=int, default=1)
    return parser


def resolve_precision(flag: int | None) -> int:
    if flag is not None:
        prec = flag
    else:
        env = os.environ.get("PDWBC_PRECISION")
        try:
            prec = int(env) if env else DEFAULT_PRECISION
        except ValueError:
            raise UsageError(f"PDWBC_PRECISION must be an integer, got {env!r}") from None
    if prec < 64:
        raise UsageError("precision must be at least 64 bits")
    return prec


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required: z, verify or sweep")
        args.precision = resolve_precision(args.precision)
        try:
            p = ModelParams(args.T, args.G)
        except DomainError as exc:
            raise UsageError(str(exc)) from None
        if args.command == "z":
            rep, code = cmd_z(args, p)
        elif args.command == "verify":
            rep, code = cmd_verify(args, p)
        else:
            rows, code = cmd_sweep(args, p)
            if args.format == "csv":
                _emit(sweep_csv(rows), args.output)
            else:
                _emit(json.dumps(rows, indent=2), args.output)
            return code
    except UsageError as exc:
        print(f"pdwbc: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(rep.to_csv() if args.format == "csv" else rep.to_json(), args.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
