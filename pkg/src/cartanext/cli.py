"""Command-line driver: ``cartanext <command> [options]``.

Exit status 2 flags bad arguments, 1 a mathematical failure (the report
then carries the violated axiom), 0 everything else.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from . import jsonio
from .catalog import FamilySpec, SampleError, get_family, load_family_table, parse_sample
from .exactmath import parse_rational
from .grading import GRADED_FAMILIES
from .extension import ExtensionError
from .normality import NormalityError
from .report import SCHEMA, Report, failure_report, family_report, sweep_report
from .sympair import PAIR_IDS

DEFAULT_STATE = "cartanext_build.json"

COMMAND_SECTIONS = {
    "build": ("validation", "normality", "canonical"),
    "curvature": ("flags", "curvature"),
    "normality": ("flags", "normality"),
    "infaut": ("infaut",),
    "check": ("validation", "flags", "normality", "curvature", "infaut", "canonical", "closed_forms"),
    "reduce": ("canonical",),
}


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="emit the JSON report")
    common.add_argument("--out", metavar="FILE", default=argparse.SUPPRESS, help="write the report to FILE")

    target = argparse.ArgumentParser(add_help=False)
    target.add_argument("--family", help="family id (see the catalog command)")
    target.add_argument("--set", action="append", default=[], metavar="NAME=VALUE", help="parameter value, a/b syntax")
    target.add_argument("--from", dest="state_from", metavar="FILE", help="read family and sample from a build file")
    target.add_argument("--state", default=DEFAULT_STATE, metavar="FILE", help="build file (default %(default)s)")

    p = argparse.ArgumentParser(prog="cartanext", description="Extensions of symmetric spaces to parabolic geometries.")
    p.add_argument("--json", action="store_true", help="emit the JSON report")
    p.add_argument("--out", metavar="FILE", help="write the report to FILE")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("catalog", parents=[common], help="list families, symmetric pairs and gradings")
    sub.add_parser("build", parents=[common, target], help="instantiate and solve a family, saving the build file")
    sub.add_parser("curvature", parents=[common, target], help="curvature of the solved extension")
    sub.add_parser("normality", parents=[common, target], help="normality solution")
    ia = sub.add_parser("infaut", parents=[common, target], help="infinitesimal automorphisms")
    ia.add_argument("--depth", type=int, default=8, help="maximal stabilization rounds")
    ck = sub.add_parser("check", parents=[common, target], help="all flags, invariants and closed-form comparisons")
    ck.add_argument("--depth", type=int, default=8, help="maximal stabilization rounds")
    ck.add_argument("--compare-paper", action="store_true", help="fail when a stored closed form disagrees")
    sub.add_parser("reduce", parents=[common, target], help="canonical parameters of the sample")
    sw = sub.add_parser("sweep", parents=[common, target], help="evaluate along one parameter")
    sw.add_argument("--param", required=True, help="sample parameter, or t for families with a t normal form")
    sw.add_argument("--values", required=True, help="comma separated values, a/b syntax")
    return p


def _resolve(args) -> Tuple[FamilySpec, Dict[str, Fraction]]:
    overrides = parse_sample(args.set)
    if args.family:
        family, sample = args.family, {}
    else:
        path = Path(args.state_from or args.state)
        if not path.exists():
            raise UsageError(f"no --family given and no build file at {path}")
        try:
            state = jsonio.loads(path.read_bytes())
            family, sample = state["family"], dict(state["sample"])
        except (ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"unreadable build file {path}: {exc}") from None
    try:
        spec = get_family(family)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    sample.update(overrides)
    return spec, sample


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "yes" if x else "no"
    if isinstance(x, dict):
        return " ".join(f"{k}={_fmt(v)}" for k, v in x.items())
    if isinstance(x, list):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    if x is None:
        return "-"
    return str(x)


def render_text(r: Report) -> str:
    lines: List[str] = []
    if r.get("command") == "catalog":
        for f in r["families"]:
            lines.append(f"{f['id']:<30} {f['grading']:<20} {f['summary']}")
        lines.append("pairs: " + ", ".join(r["pairs"]))
        lines.append("gradings: " + ", ".join(r["gradings"]))
        return "\n".join(lines) + "\n"
    if r.get("command") == "sweep":
        lines.append(f"family: {r['family']}  parameter: {r['parameter']}")
        for row in r["rows"]:
            lines.append(
                f"  {r['parameter']}={row['value']}: {_fmt(row['flags'])} curvature_entries={row['curvature_entries']}"
                f" closed_form_mismatches={_fmt(row['closed_form_mismatches'])}"
            )
        return "\n".join(lines) + "\n"
    lines.append(f"family: {r['family']}")
    lines.append(f"sample: {_fmt(r['sample'])}")
    if r.get("status") == "failed":
        lines.append(f"FAILED [{r['failure']['axiom']}]: {r['failure']['message']}")
    if "validation" in r:
        lines.append("validation: " + " ".join(f"{c['axiom']}={_fmt(c['ok'])}" for c in r["validation"]))
    if "flags" in r:
        lines.append("flags: " + _fmt(r["flags"]))
    if "normality" in r:
        n = r["normality"]
        lines.append(f"normality: {n['equations']} equations, free={_fmt(n['free'])}, gauge: {_fmt(n['gauge'])}")
        if n["zeroed"]:
            lines.append(f"  remaining freedom set to 0: {_fmt(n['zeroed'])}")
        lines.append("  values: " + _fmt(n["values"]))
    if "curvature" in r:
        lines.append(f"curvature: {len(r['curvature'])} nonzero entries")
        for c in r["curvature"]:
            lines.append(f"  kappa({c['pair'][0]},{c['pair'][1]})[{c['coordinate']}] = {c['value']}")
    if "infaut" in r:
        ia = r["infaut"]
        lines.append(
            f"infaut: dim {ia['dim']} of {ia['target_dim']}, stable={_fmt(ia['stable'])} after {ia['steps']} rounds,"
            f" equals alpha(k)={_fmt(ia['equals_alpha_k'])}"
        )
    if "canonical" in r:
        c = r["canonical"]
        value = f", {c['invariant']} = {c['value']}" if c["value"] is not None else ""
        lines.append(f"canonical: branch {c['branch']}{value}; point {_fmt(c['point'])}" + (f" ({c['note']})" if c["note"] else ""))
    if "closed_forms" in r:
        p = r["closed_forms"]
        lines.append(f"closed forms: {len(p['entries'])} entries, {p['mismatches']} mismatches")
        for e in p["entries"]:
            if not e["match"]:
                lines.append(f"  {e['entry']}: expected {e['expected']}, computed {e['computed']}")
    return "\n".join(lines) + "\n"


def _catalog_report() -> Report:
    table = load_family_table()
    return {
        "schema": SCHEMA,
        "command": "catalog",
        "families": table["families"],
        "pairs": list(PAIR_IDS),
        "gradings": list(GRADED_FAMILIES),
    }


def _exit_status(args, report: Report) -> int:
    if report.get("status") == "failed":
        return 1
    flags = report.get("flags")
    if flags is not None and not flags["normal"]:
        return 1
    if getattr(args, "compare_paper", False) and report.get("closed_forms", {}).get("mismatches"):
        return 1
    return 0


def _emit(args, report: Report) -> None:
    data = jsonio.dumps(report) if getattr(args, "json", False) else render_text(report).encode("utf-8")
    out = getattr(args, "out", None)
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "catalog":
            report = _catalog_report()
        elif args.command == "sweep":
            spec, sample = _resolve(args)
            try:
                values = [parse_rational(v) for v in args.values.split(",") if v.strip()]
            except ValueError as exc:
                raise UsageError(str(exc)) from None
            if not values:
                raise UsageError("--values needs at least one value")
            report = sweep_report(spec, args.param, values, sample)
        else:
            spec, sample = _resolve(args)
            depth = getattr(args, "depth", 8)
            if depth < 1:
                raise UsageError("--depth must be at least 1")
            report = family_report(args.command, spec, sample, COMMAND_SECTIONS[args.command], depth=depth)
            if args.command == "build" and report["status"] == "ok":
                state = {"schema": SCHEMA, "family": spec.family_id, "sample": report["sample"]}
                Path(args.state).write_bytes(jsonio.dumps(state))
    except (UsageError, SampleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ExtensionError, NormalityError) as exc:
        axiom = getattr(exc, "axiom", "normality")
        report = failure_report(args.command, getattr(args, "family", None), None, axiom, str(exc))
    _emit(args, report)
    return _exit_status(args, report)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
