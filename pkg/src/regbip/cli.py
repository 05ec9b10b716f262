"""Command-line front end.

Subcommands take positional key=value parameters; unknown keys are a usage
error. Every table is written with deterministic ordering so two runs with the
same inputs produce byte-identical output.

Exit status: 0 when every check holds, 1 when a check fails (a witness is
printed), 2 for usage, parse or hypothesis errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Optional, Sequence

from . import lab
from .arith import is_power_of
from .eta import EtaParseError, certify, parse_eta, q_expansion
from .hecke import HeckeContext, apply_Tp, eigen_check, nilpotency_probe
from .partitions import bipartition_series

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
HEAD = 20


class UsageError(Exception):
    pass


def parse_params(items: Sequence[str], allowed: Sequence[str]) -> dict[str, str]:
    """Turn ['p=5', 'k=0'] into a dict, rejecting malformed items and unknown keys."""
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise UsageError(f"expected key=value, got {item!r}")
        if key not in allowed:
            raise UsageError(f"unknown parameter {key!r}; allowed: {', '.join(allowed) or 'none'}")
        if key in out:
            raise UsageError(f"parameter {key!r} given twice")
        out[key] = value
    return out


def _int(params: dict, key: str, default: Optional[int] = None) -> int:
    if key not in params:
        if default is None:
            raise UsageError(f"missing parameter {key}")
        return default
    try:
        return int(params[key])
    except ValueError:
        raise UsageError(f"parameter {key} must be an integer, got {params[key]!r}") from None


def _int_list(text: str, key: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"parameter {key} must be a comma-separated integer list") from None


# -- rendering ------------------------------------------------------------------


def render_table(columns: Sequence[str], rows: Sequence[Sequence], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([dict(zip(columns, r)) for r in rows], indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        w.writerows(rows)
        return buf.getvalue()
    cells = [list(map(str, columns))] + [[str(c) for c in r] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(columns))]
    return "".join("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() + "\n" for row in cells)


# -- subcommands ------------------------------------------------------------------


def cmd_coeffs(args) -> tuple[str, int]:
    params = parse_params(args.params, ("ell", "n"))
    ell = _int(params, "ell")
    n = _int(params, "n", args.trunc if args.trunc is not None else HEAD)
    if ell < 2:
        raise UsageError(f"ell must be at least 2, got {ell}")
    if n < 0:
        raise UsageError("n must be nonnegative")
    s = bipartition_series(ell, n, args.mod).series
    rows = [(i, c) for i, c in enumerate(s.tolist())]
    return render_table(("n", "B"), rows, args.format), EXIT_OK


def cmd_certify(args) -> tuple[str, int]:
    params = parse_params(args.params, ("level",))
    eq = parse_eta(args.spec)
    level = _int(params, "level") if "level" in params else None
    if level is not None and level < 1:
        raise UsageError("level must be positive")
    doc = certify(eq, level).to_dict()
    if args.format == "json":
        return json.dumps(doc, indent=2) + "\n", EXIT_OK
    top = doc["character_top"]
    top_str = "none" if top is None else _factored(top)
    scalars = [
        ("eta_quotient", str(eq)),
        ("level", doc["level"]),
        ("minimal_level", doc["minimal_level"]),
        ("weight", doc["weight"]),
        ("character_top", top_str),
        ("holomorphic", doc["holomorphic"]),
        ("cuspidal", doc["cuspidal"]),
    ]
    scalars += [(f"condition:{k}", v) for k, v in doc["conditions"].items()]
    scalars += [(f"cusp:{c['d']}", f"{c['order_num']}/{c['order_den']}") for c in doc["cusps"]]
    scalars += [("warning", w) for w in doc["warnings"]]
    return render_table(("field", "value"), scalars, args.format), EXIT_OK


def _factored(top: dict) -> str:
    parts = [f"{p}^{e}" for p, e in top["factors"].items()]
    sign = "-" if top["sign"] < 0 else ""
    return sign + ("*".join(parts) if parts else "1")


def cmd_verify(args) -> tuple[str, int]:
    try:
        fid = lab.resolve_family(args.family)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    params = parse_params(args.params, lab.FAMILY_KEYS[fid])
    n_max = 2000 if args.trunc is None else args.trunc
    if n_max < 0:
        raise UsageError("--trunc must be nonnegative")
    progressions = lab.instantiate_family(fid, params)
    reports = lab.verify_all(progressions, n_max, workers=args.workers)
    if args.format == "json":
        text = lab.reports_to_json(reports)
    elif args.format == "csv":
        text = lab.reports_to_csv(reports)
    else:
        text = render_table(lab.REPORT_COLUMNS, lab.reports_to_rows(reports), "plain")
    return text, EXIT_OK if all(r.holds for r in reports) else EXIT_FAIL


def cmd_density(args) -> tuple[str, int]:
    params = parse_params(args.params, ("ell", "M", "X"))
    ell, M = _int(params, "ell"), _int(params, "M")
    if ell < 2 or M < 2:
        raise UsageError("need ell >= 2 and M >= 2")
    if "X" not in params:
        raise UsageError("missing parameter X")
    report = lab.density_scan(ell, M, _int_list(params["X"], "X"))
    rows = [(x, c, f"{float(r):.6f}") for x, c, r in report.rows()]
    return render_table(("X", "count", "ratio"), rows, args.format), EXIT_OK


def cmd_identity(args) -> tuple[str, int]:
    parse_params(args.params, ())
    bound = 5000 if args.trunc is None else args.trunc
    try:
        reports = lab.coefficient_identity_check(args.identity, bound)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    rows = [
        (r.identity, r.modulus, r.n_max, "holds" if r.holds else "fails", "" if r.witness_n is None else r.witness_n)
        for r in reports
    ]
    text = render_table(("identity", "M", "n_max", "verdict", "witness_n"), rows, args.format)
    return text, EXIT_OK if all(r.holds for r in reports) else EXIT_FAIL


def cmd_hecke(args) -> tuple[str, int]:
    params = parse_params(args.params, ("primes",))
    primes = _int_list(params.get("primes", ""), "primes")
    eq = parse_eta(args.spec)
    cert = certify(eq)
    if cert.weight.denominator != 1:
        raise UsageError(f"weight {cert.weight} is not integral")
    ctx = HeckeContext.from_certificate(cert)
    n = 1000 if args.trunc is None else args.trunc
    f = q_expansion(eq, n, args.mod)
    probing = args.mod is not None and is_power_of(2, args.mod)
    if probing and any(p % 2 == 0 or p % 3 == 0 for p in primes):
        raise UsageError("probing needs primes coprime to 6")

    rows = [("eta_quotient", str(eq)), ("level", ctx.level), ("weight", cert.weight.numerator)]
    rows.append(("modulus", "exact" if args.mod is None else args.mod))
    g = f
    for p in primes:
        lam = eigen_check(f, p, ctx) if f[1] == 1 else None
        rows.append((f"eigenvalue:{p}", "none" if lam is None else lam))
        g = apply_Tp(g, p, ctx)
    rows.append(("final_truncation", g.truncation))
    rows.append(("head", " ".join(map(str, g.tolist()[:HEAD]))))
    if probing:
        probe = nilpotency_probe(f, primes, ctx)
        rows.append(("vanish_after", "not reached" if probe.steps is None else probe.steps))
    return render_table(("field", "value"), rows, args.format), EXIT_OK


# -- entry point ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json", "plain"), default="plain")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    common.add_argument("--trunc", type=int, metavar="N", help="truncation or scan bound")
    common.add_argument("--mod", type=int, metavar="M", help="reduce coefficients modulo M")
    common.add_argument("--seed", type=int, help="reserved; all current paths are deterministic")

    parser = argparse.ArgumentParser(prog="regbip", description="Regular bipartitions, eta quotients and congruences.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", parents=[common], help="B_ell(n) for n <= N (keys: ell, n; n defaults to --trunc or 20)")
    p.add_argument("params", nargs="*", metavar="key=value")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("certify", parents=[common], help="certificate for an eta quotient such as '48^10 * 24^-2' (key: level)")
    p.add_argument("spec")
    p.add_argument("params", nargs="*", metavar="key=value")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser(
        "verify",
        parents=[common],
        help="instantiate a congruence family and scan it to --trunc (default 2000)",
        epilog="families: " + ", ".join(f"{k} ({'/'.join(v)})" for k, v in lab.FAMILY_KEYS.items()),
    )
    p.add_argument("family")
    p.add_argument("params", nargs="*", metavar="key=value")
    p.add_argument("--workers", type=int, default=1, help="threads for the batch (rows stay in order)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("density", parents=[common], help="vanishing density checkpoints (keys: ell, M, X=comma list)")
    p.add_argument("params", nargs="*", metavar="key=value")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("identity", parents=[common], help="compare B_ell with an eta expansion: B2-c or B4-d (bound --trunc, default 5000)")
    p.add_argument("identity")
    p.add_argument("params", nargs="*", metavar="key=value")
    p.set_defaults(func=cmd_identity)

    p = sub.add_parser(
        "hecke",
        parents=[common],
        help="apply T_p for primes=... to an eta expansion (truncation --trunc, default 1000); probes when --mod is a power of 2",
    )
    p.add_argument("spec")
    p.add_argument("params", nargs="*", metavar="key=value")
    p.set_defaults(func=cmd_hecke)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.mod is not None and args.mod < 2:
        parser.error("--mod must be at least 2")
    try:
        text, status = args.func(args)
    except (UsageError, EtaParseError, lab.HypothesisError, lab.NonIntegralProgression, lab.CapacityError) as exc:
        print(f"regbip {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"regbip {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
