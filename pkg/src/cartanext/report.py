"""Structured reports for one family sample, as emitted by the CLI."""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Mapping, Optional

from .catalog import (
    CanonicalForm,
    FamilySpec,
    SampleError,
    SolvedFamily,
    canonical_reduce,
    complete_sample,
    instantiate,
    closed_form_checks,
    solve_family,
)
from .extension import ExtensionError, curvature, is_flat, is_regular, is_torsion_free, validate
from .infaut import infinitesimal_automorphisms
from .normality import NormalityError, is_normal

__all__ = ["SCHEMA", "Report", "family_report", "failure_report", "sweep_report"]

SCHEMA = 1
Report = Dict[str, object]

SECTIONS = ("validation", "flags", "normality", "curvature", "infaut", "canonical", "closed_forms")


def _canonical(c: CanonicalForm) -> Report:
    return {
        "branch": c.branch,
        "invariant": c.invariant,
        "value": c.value,
        "point": c.point,
        "exact": c.exact,
        "note": c.note,
    }


def _curvature_entries(solved: SolvedFamily) -> List[Report]:
    e = solved.extension
    names = e.source_alg.names
    tnames = e.target.alg.names
    out = []
    for a, b, k, x in curvature(e).nonzero_entries():
        out.append(
            {
                "pair": [names[e.frame[a]], names[e.frame[b]]],
                "coordinate": tnames[k],
                "value": x.constant_value() if x.is_constant() else x,
            }
        )
    return out


def _normality(solved: SolvedFamily) -> Report:
    sol = solved.solution
    return {
        "equations": sol.equation_count,
        "solution": {k: sol.assignments[k] for k in sorted(sol.assignments)},
        "free": list(sol.free),
        "gauge": {k: solved.gauge[k] for k in sorted(solved.gauge)},
        "zeroed": list(solved.zeroed),
        "values": {k: solved.values[k] for k in sorted(solved.values)},
        "verified": sol.verified,
    }


def failure_report(command: str, family: Optional[str], sample: Optional[Mapping[str, Fraction]], axiom: str, message: str) -> Report:
    return {
        "schema": SCHEMA,
        "command": command,
        "family": family,
        "sample": dict(sample) if sample else {},
        "status": "failed",
        "failure": {"axiom": axiom, "message": message},
    }


def family_report(
    command: str,
    spec: FamilySpec,
    sample: Optional[Mapping[str, object]] = None,
    sections=SECTIONS,
    depth: int = 8,
) -> Report:
    """Report for ``spec`` at ``sample`` with the requested sections, in fixed order.

    Raises SampleError for inadmissible samples; mathematical failures are
    returned as a report with ``status: failed``.
    """
    s = complete_sample(spec, sample)
    out: Report = {"schema": SCHEMA, "command": command, "family": spec.family_id, "sample": s, "status": "ok"}
    try:
        template = instantiate(spec, s)
    except ExtensionError as exc:
        return failure_report(command, spec.family_id, s, exc.axiom, str(exc))
    if "validation" in sections:
        rep = validate(template)
        out["validation"] = [{"axiom": c.name, "ok": c.ok, "detail": c.detail} for c in rep.checks]
        out["info"] = {k: rep.info[k] for k in sorted(rep.info)}
    need_solution = any(x in sections for x in ("flags", "normality", "curvature", "infaut", "closed_forms"))
    solved = None
    if need_solution:
        try:
            solved = solve_family(spec, s)
        except NormalityError as exc:
            fail = failure_report(command, spec.family_id, s, "normality", str(exc))
            return {**out, **{k: v for k, v in fail.items() if k in ("status", "failure")}}
    if "flags" in sections:
        e = solved.extension
        out["flags"] = {
            "flat": is_flat(e),
            "torsion_free": is_torsion_free(e),
            "regular": is_regular(e),
            "normal": is_normal(e),
        }
    if "normality" in sections:
        out["normality"] = _normality(solved)
    if "curvature" in sections:
        out["curvature"] = _curvature_entries(solved)
    if "infaut" in sections:
        space = infinitesimal_automorphisms(solved.extension, depth=depth, with_table=False)
        out["infaut"] = {
            "dim": space.dim,
            "target_dim": space.target_dim,
            "steps": space.steps,
            "stable": space.stable,
            "contains_alpha_k": space.contains_alpha_k,
            "equals_alpha_k": space.equals_alpha_k,
        }
    if "canonical" in sections:
        out["canonical"] = _canonical(canonical_reduce(spec, s))
    if "closed_forms" in sections:
        checks = closed_form_checks(solved)
        out["closed_forms"] = {
            "entries": [
                {"entry": c.entry, "expected": c.expected, "computed": c.computed, "match": c.match} for c in checks
            ],
            "mismatches": sum(1 for c in checks if not c.match),
        }
    return out


def sweep_report(spec: FamilySpec, param: str, values: List[Fraction], base: Optional[Mapping[str, object]] = None) -> Report:
    """Flags, curvature size and canonical data along one parameter."""
    s0 = complete_sample(spec, base)
    rows = []
    for v in values:
        if param in s0:
            sample = dict(s0, **{param: v})
        elif param == "t" and spec.t_point is not None:
            sample = spec.t_point(s0, v)
        else:
            raise SampleError("unknown_parameter", f"{spec.family_id} cannot sweep {param!r}")
        rep = family_report("sweep", spec, sample, sections=("flags", "curvature", "canonical", "closed_forms"))
        rows.append(
            {
                "value": v,
                "sample": rep["sample"],
                "status": rep["status"],
                "flags": rep.get("flags"),
                "curvature_entries": len(rep.get("curvature", [])),
                "canonical": rep.get("canonical"),
                "closed_form_mismatches": rep["closed_forms"]["mismatches"] if "closed_forms" in rep else None,
            }
        )
    return {"schema": SCHEMA, "command": "sweep", "family": spec.family_id, "parameter": param, "rows": rows}
