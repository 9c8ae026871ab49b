"""Parameterized extension families and canonical-parameter reduction.

Each :class:`FamilySpec` knows how to turn a sample (structural integers
such as ``n``, ``p``, ``q``, ``c`` and the fixed coefficients ``b``) into a
validated :class:`~cartanext.extension.Extension` whose remaining unknowns
are solved by the normality solver.  Families also carry their gauge
choice, the invariant that labels equivalence classes, a sample on the flat
locus and a list of closed-form expectations used by ``--compare-paper``.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from . import jsonio
from .exactmath import Mat, PolyExpr, field_width, nullspace, parse_rational, to_rational
from .extension import (
    Extension,
    ExtensionError,
    adjoint_coords,
    apply_morphism,
    curvature,
    filtration_preserving,
    is_flat,
    require_valid,
)
from .grading import GradedAlgebra, build_graded, quaternion_right_matrix
from .liealg import AlgebraError
from .normality import NormalityError, NormalitySolution, solve_normality
from .sympair import build_pair
from .templates import (
    Blueprint,
    CPoly,
    complex_entry,
    conformal_blueprint,
    contact_projective_orthogonal_blueprint,
    cr_orthogonal_blueprint,
    cr_psu_blueprint,
    dim3_su21_blueprint,
    inclusion_blueprint,
    lagrangean_orthogonal_blueprint,
    lagrangean_pgl_blueprint,
    orthogonal_pair,
    projective_blueprint,
    resolve_aux,
    sostar_cr_blueprint,
    sostar_ctproj_blueprint,
    _orth_parts,
)

__all__ = [
    "SampleError",
    "Constraint",
    "FamilySpec",
    "SolvedFamily",
    "CanonicalForm",
    "ClosedFormCheck",
    "Witness",
    "list_families",
    "export_family_table",
    "load_family_table",
    "get_family",
    "parse_sample",
    "complete_sample",
    "instantiate",
    "solve_family",
    "canonical_reduce",
    "closed_form_checks",
    "kappa_matrix",
    "morphism_grid",
    "equivalent_under_morphism",
]

F = Fraction
STRUCTURAL = ("n", "p", "q", "c")


class SampleError(ValueError):
    """An inadmissible or malformed sample; ``constraint`` names the violated rule."""

    def __init__(self, constraint: str, message: str):
        self.constraint = constraint
        super().__init__(f"{constraint}: {message}")


@dataclass(frozen=True)
class Constraint:
    name: str
    description: str
    test: Callable[[Mapping[str, Fraction]], bool]


@dataclass(frozen=True)
class FamilySpec:
    family_id: str
    summary: str
    source: str
    target: str
    defaults: Tuple[Tuple[str, Fraction], ...]
    constraints: Tuple[Constraint, ...]
    builder: Callable[[Mapping[str, Fraction]], Blueprint]
    gauge: Callable[[Mapping[str, Fraction]], Dict[str, Fraction]] = lambda s: {}
    invariant: str = "none"
    canonical: Optional[Callable[[Mapping[str, Fraction]], "CanonicalForm"]] = None
    flat_sample: Optional[Tuple[Tuple[str, Fraction], ...]] = None
    checks: Optional[Callable[[Mapping[str, Fraction], "SolvedFamily"], List["ClosedFormCheck"]]] = None
    morphisms: Optional[Callable[[Mapping[str, Fraction]], List[Mat]]] = None
    pair_ids: Tuple[str, ...] = ()
    grading: str = ""
    t_point: Optional[Callable[[Mapping[str, Fraction], Fraction], Dict[str, Fraction]]] = None

    @property
    def structural(self) -> Tuple[str, ...]:
        return tuple(k for k, _ in self.defaults if k in STRUCTURAL)

    @property
    def fixed_names(self) -> Tuple[str, ...]:
        return tuple(k for k, _ in self.defaults if k not in STRUCTURAL)

    def summary_record(self) -> Dict[str, object]:
        return {
            "id": self.family_id,
            "summary": self.summary,
            "source": self.source,
            "pairs": list(self.pair_ids),
            "target": self.target,
            "grading": self.grading,
            "structural": list(self.structural),
            "fixed": list(self.fixed_names),
            "defaults": {k: v for k, v in self.defaults},
            "constraints": [c.description for c in self.constraints],
            "invariant": self.invariant,
            "has_flat_sample": self.flat_sample is not None,
            "sweeps_t": self.t_point is not None,
        }


@dataclass
class CanonicalForm:
    """Branch tag and invariant value of a sample.

    ``point`` is a sample with the same invariant in normal form when that
    point is rational; ``exact`` is False when it would need square roots.
    """

    branch: str
    invariant: str
    value: Optional[Fraction]
    point: Optional[Dict[str, Fraction]]
    exact: bool = True
    note: str = ""


@dataclass
class ClosedFormCheck:
    entry: str
    expected: PolyExpr
    computed: PolyExpr

    @property
    def match(self) -> bool:
        return (self.expected - self.computed).is_zero()


@dataclass
class SolvedFamily:
    spec: FamilySpec
    sample: Dict[str, Fraction]
    template: Extension
    solution: NormalitySolution
    gauge: Dict[str, Fraction]
    zeroed: List[str]
    values: Dict[str, PolyExpr]
    extension: Extension


@dataclass
class Witness:
    p0: Mat
    sigma_element: Mat


# ---------------------------------------------------------------------------
# samples


def parse_sample(pairs: Sequence[str]) -> Dict[str, Fraction]:
    """``name=value`` strings (values in ``a/b`` syntax) to a sample."""
    out: Dict[str, Fraction] = {}
    for item in pairs:
        if "=" not in item:
            raise SampleError("syntax", f"expected name=value, got {item!r}")
        k, v = item.split("=", 1)
        k = k.strip()
        if not k:
            raise SampleError("syntax", f"empty parameter name in {item!r}")
        try:
            out[k] = parse_rational(v.strip())
        except ValueError as exc:
            raise SampleError("syntax", str(exc)) from None
    return out


def complete_sample(spec: FamilySpec, sample: Optional[Mapping[str, object]] = None) -> Dict[str, Fraction]:
    """Defaults overlaid with ``sample``; checks names, integrality and constraints."""
    full = {k: v for k, v in spec.defaults}
    for k, v in (sample or {}).items():
        if k not in full:
            raise SampleError("unknown_parameter", f"{spec.family_id} has no parameter {k!r}")
        full[k] = to_rational(v)
    for k in spec.structural:
        if full[k].denominator != 1:
            raise SampleError("integer", f"{k} must be an integer")
    if "c" in full and full["c"] not in (1, -1):
        raise SampleError("c_sign", "c must be 1 or -1")
    for k in ("n", "p", "q"):
        if k in full and full[k] < 0:
            raise SampleError("nonnegative", f"{k} must be non-negative")
    for c in spec.constraints:
        if not c.test(full):
            raise SampleError(c.name, c.description)
    return full


def _i(s: Mapping[str, Fraction], k: str) -> int:
    return int(s[k])


def _bs(s: Mapping[str, Fraction]) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
    return s["b1"], s["b2"], s["b3"], s["b4"]


def _gamma_delta(s: Mapping[str, Fraction]) -> Tuple[Fraction, Fraction]:
    b1, b2, b3, b4 = _bs(s)
    return s["c"] * b1 * b3 + b2 * b4, b1 * b4 - b2 * b3


def _n_orth(s: Mapping[str, Fraction]) -> int:
    return _i(s, "p") + _i(s, "q")


def _rational_sqrt(x: Fraction) -> Optional[Fraction]:
    if x < 0:
        return None
    num, den = x.numerator, x.denominator
    rn, rd = _isqrt(num), _isqrt(den)
    if rn * rn == num and rd * rd == den:
        return F(rn, rd)
    return None


def _isqrt(k: int) -> int:
    import math

    return math.isqrt(k)


def _const(x) -> PolyExpr:
    return PolyExpr.lift(x)


DELTA = Constraint("delta_nonzero", "b1*b4 - b2*b3 != 0", lambda s: s["b1"] * s["b4"] - s["b2"] * s["b3"] != 0)
SIZE_PQ = Constraint("size", "p + q >= 1", lambda s: s["p"] + s["q"] >= 1)
SIZE_N = Constraint("size", "n >= 1", lambda s: s["n"] >= 1)


# ---------------------------------------------------------------------------
# curvature as target matrices


def kappa_matrix(solved: SolvedFamily, a: int, b: int) -> Mat:
    """kappa on the frame positions a, b as a target matrix."""
    e = solved.extension
    vec = curvature(e)(a, b)
    return e.target.alg.element([x.constant_value() for x in vec])


def _frame_position(e: Extension, name: str) -> int:
    return e.frame.index(e.source_alg.names.index(name))


# ---------------------------------------------------------------------------
# closed-form expectations


def _value_checks(expected: Mapping[str, object], solved: SolvedFamily, prefix: str = "alpha") -> List[ClosedFormCheck]:
    out = []
    for name, val in expected.items():
        got = solved.values.get(name)
        if got is None:
            got = solved.gauge.get(name)
        out.append(ClosedFormCheck(f"{prefix}.{name}", _const(val), _const(got if got is not None else 0)))
    return out


def _symbolic_checks(relations: Mapping[str, PolyExpr], solved: SolvedFamily) -> List[ClosedFormCheck]:
    """Relations that must vanish on the ungauged solution (symbolic in its free names)."""
    assign = solved.solution.assignments
    out = []
    for label, expr in relations.items():
        out.append(ClosedFormCheck(f"normality.{label}", _const(0), expr.subs(assign)))
    return out


def _flat_check(solved: SolvedFamily, expect_flat: bool) -> ClosedFormCheck:
    return ClosedFormCheck("flat", _const(int(expect_flat)), _const(int(is_flat(solved.extension))))


def _orth_frame_parts(e: Extension, n: int):
    return [_orth_parts(e.source_alg.basis[k], n) for k in e.frame]


def _matrix_checks(solved: SolvedFamily, formula, n: int, label: str, entries=None) -> List[ClosedFormCheck]:
    """Compare kappa(u, v) with formula(parts_u, parts_v) on all frame pairs."""
    e = solved.extension
    parts = _orth_frame_parts(e, n)
    out = []
    names = [e.source_alg.names[k] for k in e.frame]
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            expected = formula(parts[i], parts[j])
            got = kappa_matrix(solved, i, j)
            for (r, c), val in expected.items():
                if entries is not None and (r, c) not in entries:
                    continue
                out.append(ClosedFormCheck(f"{label}({names[i]},{names[j]})[{r},{c}]", _const(val), _const(got[r, c])))
    return out


def _vec_ti(v, signs):
    return [x * s for x, s in zip(v, signs)]


def _outer(u, v):
    return [[a * b for b in v] for a in u]


def _mat_add(*terms):
    """Sum of (coefficient, matrix) pairs."""
    n = len(terms[0][1])
    out = [[F(0)] * n for _ in range(n)]
    for coef, m in terms:
        for i in range(n):
            for j in range(n):
                out[i][j] += coef * m[i][j]
    return out


def _lagrangean_kappa(n: int, c: int, signs, branch: str, t: Fraction):
    """Closed-form curvature of the canonical Lagrangean extensions (block entries)."""

    def formula(u, v):
        a, x, y, _ = u
        b, z, w, _ = v
        xi, yi, zi, wi = (_vec_ti(q, signs) for q in (x, y, z, w))
        r1 = sum((wq * xq for wq, xq in zip(wi, x)), F(0)) - sum((yq * zq for yq, zq in zip(yi, z)), F(0))
        out: Dict[Tuple[int, int], Fraction] = {}
        mid = [[F(0)] * n for _ in range(n)]
        top = [F(0)] * n
        right = [F(0)] * n
        if branch == "main":
            coef = F(n + 2, n + 1) * t * (1 + c * t * t)
            top = [coef * (b * xq - a * zq) for xq, zq in zip(xi, zi)]
            R1 = _mat_add((1, _outer(w, xi)), (-1, _outer(z, yi)))
            R2 = _mat_add((1, _outer(x, wi)), (-1, _outer(y, zi)))
            R3 = _mat_add((1, _outer(z, xi)), (-1, _outer(x, zi)))
            mid = _mat_add((t, R1), (-t / (n + 1), R2), (F(n + 2, n + 1) * c * t * t, R3))
            v1 = [t * (b * xq - a * zq) + c * (b * yq - a * wq) for xq, yq, zq, wq in zip(x, y, z, w)]
            right = [-F(n + 2, n + 1) * t * q for q in v1]
            scal = -t * r1 / (n + 1)
        elif branch == "a":
            k = F(n + 2, n + 1)
            top = [k * (b * yq - a * zq) + k * (b * xq - a * wq) for xq, yq, zq, wq in zip(xi, yi, zi, wi)]
            R1 = _mat_add((1, _outer(w, xi)), (-1, _outer(y, zi)))
            R2 = _mat_add((1, _outer(x, wi)), (-1, _outer(z, yi)))
            R3 = _mat_add((1, _outer(y, wi)), (-1, _outer(w, yi)))
            mid = _mat_add((1, R1), (-F(1, n + 1), R2), (-F(n + 2, n + 1), R3))
            scal = -r1 / (n + 1)
        else:
            R1 = _mat_add((1, _outer(x, wi)), (-1, _outer(z, yi)))
            R2 = _mat_add((1, _outer(w, xi)), (-1, _outer(y, zi)))
            R3 = _mat_add((1, _outer(x, zi)), (-1, _outer(z, xi)))
            R4 = _mat_add((1, _outer(y, wi)), (-1, _outer(w, yi)))
            k = F(1, 2 * (n + 1))
            mid = _mat_add((k * n, R1), (k * n, R2), (k * (n + 2), R3), (-k * (n + 2), R4))
            scal = -r1 / (n + 1)
        for i in range(n):
            mid[i][i] += scal
        size = n + 2
        for r in range(size):
            for col in range(size):
                out[(r, col)] = F(0)
        for j in range(n):
            out[(0, 1 + j)] = top[j]
            out[(1 + j, size - 1)] = right[j]
            for k2 in range(n):
                out[(1 + j, 1 + k2)] = mid[j][k2]
        return out

    return formula


def _lagrangean_branch(s: Mapping[str, Fraction]) -> Optional[Tuple[str, Fraction]]:
    """Which printed canonical form the sample sits on, if any."""
    c = s["c"]
    b = _bs(s)
    if b[0] == 1 and b[1] == 0 and b[3] == 1:
        return "main", c * b[2]
    if c == -1 and b == (1, 1, 0, 1):
        return "a", F(1)
    if c == -1 and b == (1, 1, -1, 1):
        return "b", F(1)
    return None


def _lagrangean_general_relations(s, names) -> Dict[str, PolyExpr]:
    n = _n_orth(s) if "p" in s else 1
    c = s["c"]
    b1, b2, b3, b4 = _bs(s)
    gamma, delta = _gamma_delta(s)
    v = {k: PolyExpr.var(names.get(k, k)) for k in ("c1", "c2", "d1", "d2", "d3", "d4", "e1")}
    k = F(n, n + 1) * gamma / delta
    return {
        "c2": v["c2"] + k,
        "e1": v["e1"] - (v["d2"] * v["d3"] - v["d1"] * v["d4"]),
        "r1": v["d1"] * b4 - v["d2"] * b3 - (-b4 * b4 - c * b3 * b3) / delta,
        "r2": v["d3"] * b2 - v["d4"] * b1 - (b2 * b2 + c * b1 * b1) / delta,
        "r3": v["d1"] * b2 - v["d2"] * b1 - v["d3"] * b4 + v["d4"] * b3 + k,
        "r4": v["d1"] * b2 - v["d2"] * b1 + v["d3"] * b4 - v["d4"] * b3 + v["c1"] * 2 - k,
    }


def _lagrangean_general_alpha(s, n: int) -> Dict[str, Fraction]:
    c = s["c"]
    b1, b2, b3, b4 = _bs(s)
    g, d = _gamma_delta(s)
    q = F(n + 2, 2 * (n + 1)) * g / (d * d)
    return {
        "c1": F(n, 2 * (n + 1)) * g / d,
        "c2": -F(n, n + 1) * g / d,
        "e1": -(F((3 * n + 2) * (n + 2), 4 * (n + 1) ** 2) * g * g / d ** 3 + c / d),
        "d1": -(q * b3 + b4 / d),
        "d2": -(c * q * b4 - c * b3 / d),
        "d3": -(q * b1 - b2 / d),
        "d4": -(c * q * b2 + c * b1 / d),
    }


def _lagrangean_canonical_alpha(n: int, c: int, branch: str, t: Fraction) -> Dict[str, Fraction]:
    k = F(n, 2 * (n + 1))
    if branch == "main":
        return {
            "c1": k * t,
            "d1": -(F(n + 2, 2 * (n + 1)) * c * t * t + 1),
            "d2": -k * t,
            "e1": -F((3 * n + 2) * (n + 2), 4 * (n + 1) ** 2) * t * t - c,
            "c2": -F(n, n + 1) * t,
            "d3": -F(n + 2, 2 * (n + 1)) * t,
            "d4": F(-c),
        }
    if branch == "a":
        return {
            "c1": k,
            "d1": F(-1),
            "d2": -F(n + 2, 2 * (n + 1)),
            "e1": 1 - F((3 * n + 2) * (n + 2), 4 * (n + 1) ** 2),
            "c2": -F(n, n + 1),
            "d3": k,
            "d4": k,
        }
    return {
        "c1": k,
        "d1": -F(n, 4 * (n + 1)),
        "d2": F(n, 4 * (n + 1)),
        "e1": F(n * n, 8 * (n + 1) ** 2),
        "c2": -F(n, n + 1),
        "d3": F(n, 4 * (n + 1)),
        "d4": F(n, 4 * (n + 1)),
    }


def _rename(d: Mapping[str, object], names: Mapping[str, str]) -> Dict[str, object]:
    return {names.get(k, k): v for k, v in d.items()}


def _lagrangean_checks(names: Mapping[str, str], dim3: bool):
    def checks(s, solved: SolvedFamily) -> List[ClosedFormCheck]:
        n = 1 if dim3 else _n_orth(s)
        c = int(s["c"])
        signs = [1] * (n if dim3 else _i(s, "p")) + ([] if dim3 else [-1] * _i(s, "q"))
        out = _symbolic_checks(_lagrangean_general_relations(dict(s, p=F(n), q=F(0)) if dim3 else s, names), solved)
        out += _value_checks(_rename(_lagrangean_general_alpha(s, n), names), solved, "alpha.general")
        gamma, _ = _gamma_delta(s)
        out.append(_flat_check(solved, gamma == 0 or _lagrangean_branch(s) == ("b", F(1)) and n == 1))
        br = _lagrangean_branch(s)
        if br is None:
            return out
        branch, t = br
        if dim3:
            out += _value_checks(_rename(_dim3_sl3_alpha(c, branch, s["b3"]), names), solved, "alpha.canonical")
            out += _matrix_checks(solved, _dim3_sl3_kappa(c, branch, s["b3"]), 1, "kappa.canonical")
        else:
            out += _value_checks(_rename(_lagrangean_canonical_alpha(n, c, branch, t), names), solved, "alpha.canonical")
            out += _matrix_checks(solved, _lagrangean_kappa(n, c, signs, branch, t), n, "kappa.canonical")
        return out

    return checks


def _dim3_sl3_alpha(c: int, branch: str, t: Fraction) -> Dict[str, Fraction]:
    """Printed three-dimensional sl(3) forms, in the shared template's names."""
    if branch == "main" and c == 1:
        return {"c1": t / 4, "d1": -(3 * t * t + 4) / 4, "d2": t / 4, "e1": -(15 * t * t + 16) / 16,
                "c2": -t / 2, "d3": -3 * t / 4, "d4": F(-1)}
    if branch == "main":
        return {"c1": -t / 4, "d1": (3 * t * t - 4) / 4, "d2": -t / 4, "e1": (16 - 15 * t * t) / 16,
                "c2": t / 2, "d3": 3 * t / 4, "d4": F(1)}
    if branch == "a":
        return {"c1": F(1, 4), "d1": F(-1), "d2": F(-3, 4), "e1": F(1, 16), "c2": F(-1, 2), "d3": F(1, 4), "d4": F(1, 4)}
    return {"c1": F(1, 4), "d1": F(-1, 8), "d2": F(1, 8), "e1": F(1, 32), "c2": F(-1, 2), "d3": F(1, 8), "d4": F(1, 8)}


def _dim3_sl3_kappa(c: int, branch: str, t: Fraction):
    """kappa((e,x1,x2),(h,y1,y2)) entries (0,1) and (1,2) as printed."""

    def formula(u, v):
        e, x, y, _ = u
        h, z, w, _ = v
        p1 = h * x[0] - e * z[0]
        p2 = h * y[0] - e * w[0]
        out = {(r, col): F(0) for r in range(3) for col in range(3)}
        if branch == "main":
            out[(0, 1)] = F(3, 2) * (t ** 3 + c * t) * p1
            out[(1, 2)] = -F(3, 2) * t * t * p1 - F(3, 2) * t * p2
        elif branch == "a":
            out[(0, 1)] = F(3, 2) * p1 + F(3, 2) * p2
        return out

    return formula


def _su21_checks(s, solved: SolvedFamily) -> List[ClosedFormCheck]:
    c = int(s["c"])
    b1, b2, b3, b4 = _bs(s)
    out = []
    if b2 == 0 and b3 == 0 and b1 * b4 == 1:
        t = b1
        t4 = t ** 4
        if c == 1:
            exp = {"a1": F(0), "a2": (1 + t4) / (8 * t * t), "c1": -(15 * t4 * t4 - 34 * t4 + 15) / (128 * t4),
                   "d1": (5 - 3 * t4) / (16 * t), "d2": F(0), "d3": F(0), "d4": (5 * t4 - 3) / (16 * t ** 3)}
        else:
            exp = {"a1": F(0), "a2": (1 - t4) / (8 * t * t), "c1": -(15 * t4 * t4 + 34 * t4 + 15) / (128 * t4),
                   "d1": (3 * t4 + 5) / (16 * t), "d2": F(0), "d3": F(0), "d4": (-5 * t4 - 3) / (16 * t ** 3)}
        out += _value_checks(exp, solved, "alpha.canonical")
        e = solved.extension
        k = F(3) * (1 - t4 * t4) / 16
        pos = {nm: _frame_position(e, nm) for nm in ("a", "x1", "y1")}
        # printed: coefficient of (h x2 - e y2) is real, of (h x1 - e y1) imaginary
        for nm, expect in (("y1", (k / t ** 5, F(0))), ("x1", (F(0), k / t ** 3))):
            got = kappa_matrix(solved, pos[nm], pos["a"])
            z = complex_entry(got, 1, 2)
            out.append(ClosedFormCheck(f"kappa.canonical({nm},a)[1,2].re", _const(expect[0]), z.re))
            out.append(ClosedFormCheck(f"kappa.canonical({nm},a)[1,2].im", _const(expect[1]), z.im))
        out.append(_flat_check(solved, t4 == 1))
    return out


def _sp4_checks(s, solved: SolvedFamily) -> List[ClosedFormCheck]:
    c = int(s["c"])
    out = []
    if _bs(s) == (1, 0, 0, 1):
        if c == 1:
            exp = {"a1": F(0), "a2": F(0), "a3": F(1, 2), "a4": F(-1, 2), "d1": F(-1, 4), "d2": F(0), "d3": F(0),
                   "d4": F(-1, 4), "c1": F(-1, 8)}
        else:
            exp = {"a1": F(0), "a2": F(0), "a3": F(-1, 2), "a4": F(-1, 2), "d1": F(-1, 4), "d2": F(0), "d3": F(0),
                   "d4": F(1, 4), "c1": F(1, 8)}
        out += _value_checks(exp, solved, "alpha.canonical")
    out.append(_flat_check(solved, True))
    return out


def _ctproj_checks(s, solved: SolvedFamily) -> List[ClosedFormCheck]:
    n = _n_orth(s)
    c = int(s["c"])
    out = []
    if _bs(s) == (1, 0, 0, 1):
        exp = {"c1": F(0), "c2": F(0), "g": F(1, n + 1), "h": F(-1, n + 1), "d1": -F(n, 2 * (n + 1)), "d2": F(0),
               "d3": F(0), "d4": -F(c * n, 2 * (n + 1)), "e1": -F(2 * c * n * n, 4 * (n + 1) ** 2)}
        out += _value_checks(exp, solved, "alpha.canonical")
        signs = [1] * _i(s, "p") + [-1] * _i(s, "q")

        def formula(u, v):
            _, x1, x2, _ = u
            _, y1, y2, _ = v
            x1i, x2i, y1i, y2i = (_vec_ti(q, signs) for q in (x1, x2, y1, y2))
            # transposes in the printed formula carry no metric: X^T Y is the plain product
            R1 = _mat_add(
                (F(n + 2, 2 * (n + 1)), _outer(x1, y1)), (-F(n + 2, 2 * (n + 1)), _outer(y1, x1)),
                (F(c * (n + 2), 2 * (n + 1)), _outer(x2, y2)), (-F(c * (n + 2), 2 * (n + 1)), _outer(y2, x2)),
            )
            r2 = F(1, n + 1) * (sum((a * b for a, b in zip(x2, y1)), F(0)) - sum((a * b for a, b in zip(x1, y2)), F(0)))
            R3 = _mat_add(
                (F(n, 2 * (n + 1)), _outer(x1, y2)), (F(n, 2 * (n + 1)), _outer(y2, x1)),
                (-F(n, 2 * (n + 1)), _outer(x2, y1)), (-F(n, 2 * (n + 1)), _outer(y1, x2)),
            )
            size = 2 * n + 2
            out_m = {(r, col): F(0) for r in range(size) for col in range(size)}
            for i in range(n):
                for j in range(n):
                    iden = F(int(i == j))
                    out_m[(1 + i, 1 + j)] = R1[i][j]
                    out_m[(1 + i, 1 + n + j)] = (-c * R3[i][j] - r2 * iden) * signs[j]
                    out_m[(1 + n + i, 1 + j)] = signs[i] * (R3[i][j] + r2 * iden)
                    out_m[(1 + n + i, 1 + n + j)] = signs[i] * R1[i][j] * signs[j]
            return out_m

        out += _matrix_checks(solved, formula, n, "kappa.canonical")
    return out


def _pgl_checks(s, solved: SolvedFamily) -> List[ClosedFormCheck]:
    b1, b2 = s["b1"], s["b2"]
    c1 = PolyExpr.var("c1")
    v = {k: PolyExpr.var(k) for k in ("c2", "d1", "d2", "e1")}
    rel = {
        "c2": v["c2"],
        "d1": v["d1"] - c1 / b1,
        "d2": v["d2"] + (c1 - 1) / b2,
        "e1": v["e1"] + (c1 - 1) * c1 / (b1 * b2),
    }
    out = _symbolic_checks(rel, solved)
    out += _value_checks({"c1": F(1, 2), "d1": 1 / (2 * b1), "d2": 1 / (2 * b2), "e1": 1 / (4 * b1 * b2), "c2": F(0)},
                         solved, "alpha.canonical")
    out.append(_flat_check(solved, True))
    return out


def _psu_checks(s, solved: SolvedFamily) -> List[ClosedFormCheck]:
    br, bi = s["br"], s["bi"]
    v = {k: PolyExpr.var(k) for k in ("cr", "ci", "dr", "di", "e")}
    rel = {
        "re_c": v["cr"] - F(1, 2),
        "e_dd": v["e"] - v["dr"] * v["dr"] - v["di"] * v["di"],
        "c_bd.re": v["cr"] - (v["dr"] * br + v["di"] * bi),
        "c_bd.im": v["ci"] - (v["di"] * br - v["dr"] * bi),
    }
    out = _symbolic_checks(rel, solved)
    nb = br * br + bi * bi
    out += _value_checks({"cr": F(1, 2), "ci": F(0), "dr": br / (2 * nb), "di": bi / (2 * nb), "e": 1 / (4 * nb)},
                         solved, "alpha.canonical")
    out.append(_flat_check(solved, True))
    return out


def _cr_orth_t(s) -> Fraction:
    c = s["c"]
    b1r, b1i, b2r, b2i = s["b1r"], s["b1i"], s["b2r"], s["b2i"]
    n1, n2 = b1r ** 2 + b1i ** 2, b2r ** 2 + b2i ** 2
    if c == 1:
        return (n1 + n2) / (n1 - n2)
    return 2 * (b1r * b2i - b2r * b1i) / (n1 - n2)


def _cr_orth_checks(s, solved: SolvedFamily) -> List[ClosedFormCheck]:
    n = _n_orth(s)
    c = int(s["c"])
    b1 = CPoly(s["b1r"], s["b1i"])
    b2 = CPoly(s["b2r"], s["b2i"])
    dl = s["b1r"] ** 2 + s["b1i"] ** 2 - s["b2r"] ** 2 - s["b2i"] ** 2
    t = _cr_orth_t(s)
    k = F(n + 2, 4 * (n + 1)) * t / dl
    iu = CPoly(0, 1)
    if c == -1:
        d1 = iu * b2 * (1 / (2 * dl)) - b1 * k
        q = iu * b1 * (1 / (2 * dl)) + b2 * k
    else:
        d1 = b1 * (1 / (2 * dl)) - b1 * k
        q = b2 * (1 / (2 * dl)) + b2 * k
    d2 = -q
    exp = {
        "c1r": F(0),
        "c1i": F(n, 2 * (n + 1)) * t,
        "e1": F(c) / (2 * dl) - F((n + 2) * (3 * n + 2), 8 * (n + 1) ** 2) * t * t / dl,
        "d1r": d1.re.constant_value(),
        "d1i": d1.im.constant_value(),
        "d2r": d2.re.constant_value(),
        "d2i": d2.im.constant_value(),
    }
    out = _value_checks(exp, solved, "alpha.canonical")
    out.append(_flat_check(solved, t == 0))
    return out


def _projective_checks(s, solved: SolvedFamily) -> List[ClosedFormCheck]:
    return [ClosedFormCheck("unique_b2.free_count", _const(0), _const(len(solved.solution.free)))]


def _flat_only(expect: bool):
    def checks(s, solved: SolvedFamily) -> List[ClosedFormCheck]:
        return [_flat_check(solved, expect)]

    return checks


def _sostar_cr_t(s) -> Fraction:
    b1, b2, b3, b4 = _bs(s)
    return 2 * (b1 * b4 - b2 * b3) / (b1 * b1 + b2 * b2 + b3 * b3 + b4 * b4)


def _sostar_cr_checks(s, solved: SolvedFamily) -> List[ClosedFormCheck]:
    return [_flat_check(solved, _sostar_cr_t(s) == 0)]


# ---------------------------------------------------------------------------
# canonical forms


def _canon_lagrangean(dim3: bool):
    def canon(s) -> CanonicalForm:
        c = s["c"]
        b1, b2, b3, b4 = _bs(s)
        gamma, delta = _gamma_delta(s)
        t = abs(gamma / delta)
        base = {k: s[k] for k in s if k not in ("b1", "b2", "b3", "b4")}
        if c == 1:
            b3c = t if dim3 or c == 1 else -t
            return CanonicalForm("c=1", "t=|gamma/delta|", t, dict(base, b1=F(1), b2=F(0), b3=b3c, b4=F(1)))
        if b1 * b1 < b2 * b2 or (b1 * b1 == b2 * b2 and b3 * b3 > b4 * b4):
            b1, b2, b3, b4 = b2, b1, b4, b3
        if b1 * b1 > b2 * b2:
            b3c = t if dim3 else -t
            return CanonicalForm("a", "t=|gamma/delta|", t, dict(base, b1=F(1), b2=F(0), b3=b3c, b4=F(1)))
        if b3 * b3 < b4 * b4:
            return CanonicalForm("b", "t=|gamma/delta|", t, dict(base, b1=F(1), b2=F(1), b3=F(0), b4=F(1)))
        return CanonicalForm("c", "t=|gamma/delta|", t, dict(base, b1=F(1), b2=F(1), b3=F(-1), b4=F(1)))

    return canon


def _canon_su21(s) -> CanonicalForm:
    c = s["c"]
    b1, b2, b3, b4 = _bs(s)
    delta = b1 * b4 - b2 * b3
    sv = (c * b1 * b1 + b2 * b2 + c * b3 * b3 + b4 * b4) / abs(delta)
    disc = _rational_sqrt(sv * sv - 4 * c)
    base = {k: s[k] for k in s if k not in ("b1", "b2", "b3", "b4")}
    if disc is None:
        return CanonicalForm("c=%d" % c, "s", sv, None, False, "canonical t needs a square root")
    t2 = (sv + c * disc) / (2 * c)
    t = _rational_sqrt(t2)
    if t is None:
        return CanonicalForm("c=%d" % c, "s", sv, None, False, "canonical t needs a square root")
    return CanonicalForm("c=%d" % c, "s", sv, dict(base, b1=t, b2=F(0), b3=F(0), b4=1 / t), True, f"t={t}")


def _cr_orth_point(s: Mapping[str, Fraction], t: Fraction) -> Dict[str, Fraction]:
    """Sample b1 = 1, b2 = i*y on the level set of the invariant t."""
    c = s["c"]
    if c == 1:
        if t < 1:
            raise SampleError("t_range", "t >= 1 is required for c=1")
        y = _rational_sqrt((t - 1) / (t + 1))
    else:
        root = _rational_sqrt(1 + t * t)
        y = None if root is None else (F(0) if t == 0 else (root - 1) / t)
    if y is None:
        raise SampleError("irrational_point", f"the normal form at t={t} needs a square root")
    return dict(s, b1r=F(1), b1i=F(0), b2r=F(0), b2i=y)


def _canon_cr_orth(s) -> CanonicalForm:
    """b ~ lambda*b; the class is fixed by |t| (c=1) or by t*sign(delta) (c=-1).

    Normal form b1 = 1, b2 = i*y.
    """
    c = s["c"]
    n1 = s["b1r"] ** 2 + s["b1i"] ** 2
    n2 = s["b2r"] ** 2 + s["b2i"] ** 2
    t = _cr_orth_t(s)
    t = abs(t) if c == 1 else (t if n1 > n2 else -t)
    try:
        point = _cr_orth_point(s, t)
    except SampleError as exc:
        return CanonicalForm("c=%d" % c, "t", t, None, False, str(exc))
    return CanonicalForm("c=%d" % c, "t", t, point)


def _sostar_t_point(s: Mapping[str, Fraction], t: Fraction) -> Dict[str, Fraction]:
    """b = (1, 0, 0, r) with 2r/(1+r^2) = t."""
    if abs(t) > 1:
        raise SampleError("t_range", "|t| <= 1 is required")
    root = _rational_sqrt(1 - t * t)
    if root is None:
        raise SampleError("irrational_point", f"the normal form at t={t} needs a square root")
    r = F(0) if t == 0 else (1 - root) / t
    return dict(s, b1=F(1), b2=F(0), b3=F(0), b4=r)


def _canon_sostar_cr(s) -> CanonicalForm:
    """b ~ lambda*b; normal form (1, 0, 0, r)."""
    t = _sostar_cr_t(s)
    try:
        point = _sostar_t_point(s, t)
    except SampleError as exc:
        return CanonicalForm("unique-branch", "t", t, None, False, str(exc))
    return CanonicalForm("unique-branch", "t", t, point)


def _t_dim3_sl3(s: Mapping[str, Fraction], t: Fraction) -> Dict[str, Fraction]:
    return dict(s, b1=F(1), b2=F(0), b3=t, b4=F(1))


def _t_lagrangean(s: Mapping[str, Fraction], t: Fraction) -> Dict[str, Fraction]:
    return dict(s, b1=F(1), b2=F(0), b3=s["c"] * t, b4=F(1))


def _t_su21(s: Mapping[str, Fraction], t: Fraction) -> Dict[str, Fraction]:
    if t == 0:
        raise SampleError("t_range", "t != 0 is required")
    return dict(s, b1=t, b2=F(0), b3=F(0), b4=1 / t)


def _canon_unique(point: Optional[Dict[str, Fraction]] = None):
    def canon(s) -> CanonicalForm:
        pt = dict(s)
        pt.update(point or {})
        return CanonicalForm("unique", "none", None, pt)

    return canon


# ---------------------------------------------------------------------------
# morphism generators


def _orth_grid(s) -> List[Mat]:
    """Source group elements acting on the two-dimensional corner."""
    c = s["c"]
    n = _n_orth(s) if "p" in s else 1
    size = n + 2
    corners = []
    for t in (F(0), F(1, 2), F(2), F(-1, 2), F(-2), F(1, 3), F(3)):
        if c == 1:
            d = 1 + t * t
            corners.append(((1 - t * t) / d, -2 * t / d, 2 * t / d, (1 - t * t) / d))
        elif t * t != 1:
            d = 1 - t * t
            corners.append(((1 + t * t) / d, 2 * t / d, 2 * t / d, (1 + t * t) / d))
    out = []
    for r in corners:
        for s1 in (1, -1):
            for s2 in (1, -1):
                for swap in (False, True):
                    m = [[F(int(i == j)) for j in range(size)] for i in range(size)]
                    a, b, cc, d = r
                    blk = [[a * s1, b * s2], [cc * s1, d * s2]]
                    if swap:
                        blk = [[blk[0][1], blk[0][0]], [blk[1][1], blk[1][0]]]
                    m[0][0], m[0][1], m[1][0], m[1][1] = blk[0][0], blk[0][1], blk[1][0], blk[1][1]
                    out.append(Mat(m))
    return out


def morphism_grid(spec: FamilySpec, sample: Mapping[str, Fraction]) -> List[Mat]:
    """Source group elements of the family's generator grid that normalize the source algebra."""
    if spec.morphisms is None:
        return []
    s = complete_sample(spec, sample)
    alg = spec.builder(s).pair.alg
    out = []
    for g in spec.morphisms(s):
        try:
            adjoint_coords(alg, g)
        except (AlgebraError, ZeroDivisionError):
            continue
        out.append(g)
    return out


# ---------------------------------------------------------------------------
# the families


def _lag_orth_builder(names: Mapping[str, str], dim3: bool):
    def build(s) -> Blueprint:
        p, q = (1, 0) if dim3 else (_i(s, "p"), _i(s, "q"))
        return lagrangean_orthogonal_blueprint(int(s["c"]), p, q, _bs(s), dict(names))

    return build


def _lag_orth_gauge(names: Mapping[str, str], dim3: bool):
    def gauge(s) -> Dict[str, Fraction]:
        n = 1 if dim3 else _n_orth(s)
        g, d = _gamma_delta(s)
        return {names.get("c1", "c1"): F(n, 2 * (n + 1)) * g / d}

    return gauge


DIM3_SL3_NAMES = {"c1": "a1", "c2": "a2", "e1": "c1"}
DIM3_SP4_NAMES = {"c1": "a1", "c2": "a2", "g": "a3", "h": "a4", "e1": "c1"}
CR_ORTH_NONZERO = Constraint(
    "norms_differ", "|b1| != |b2|", lambda s: s["b1r"] ** 2 + s["b1i"] ** 2 != s["b2r"] ** 2 + s["b2i"] ** 2
)
B_NONZERO = Constraint("b_nonzero", "b != 0", lambda s: any(s[k] for k in ("b1", "b2", "b3", "b4")))


def _families() -> Tuple[FamilySpec, ...]:
    ORTH = ("so(p+2,q)", "so(p+1,q+1)")
    orth_defaults = (("c", F(1)), ("p", F(1)), ("q", F(0)))
    b_defaults = (("b1", F(1)), ("b2", F(0)), ("b3", F(1)), ("b4", F(1)))
    return (
        FamilySpec(
            "projective",
            "projective structure on an orthogonal symmetric space; b2 from normality",
            "so(p+2,q) for c=1, so(p+1,q+1) for c=-1",
            "projective n=p+q",
            orth_defaults,
            (SIZE_PQ,),
            lambda s: projective_blueprint(orthogonal_pair(int(s["c"]), _i(s, "p"), _i(s, "q"))),
            canonical=_canon_unique(),
            flat_sample=(),
            checks=_projective_checks,
            pair_ids=ORTH,
            grading="projective",
        ),
        FamilySpec(
            "conformal",
            "conformal structure on an orthogonal symmetric space; b2 from normality",
            "so(p+2,q) for c=1, so(p+1,q+1) for c=-1",
            "conformal with the Killing signature of m",
            orth_defaults,
            (SIZE_PQ,),
            lambda s: conformal_blueprint(orthogonal_pair(int(s["c"]), _i(s, "p"), _i(s, "q"))),
            canonical=_canon_unique(),
            flat_sample=(),
            checks=_flat_only(True),
            pair_ids=ORTH,
            grading="conformal",
        ),
        FamilySpec(
            "quaternionic-inclusion",
            "so*(2n+2) included in sl(n+1,H)",
            "so*(2n+2) (quaternionic realization)",
            "quaternionic n",
            (("n", F(1)),),
            (SIZE_N,),
            lambda s: inclusion_blueprint(
                build_pair("so*(2n+2)", n=_i(s, "n"), realization="quaternionic"), build_graded("quaternionic", n=_i(s, "n"))
            ),
            canonical=_canon_unique(),
            flat_sample=(),
            checks=_flat_only(True),
            pair_ids=("so*(2n+2)",),
            grading="quaternionic",
        ),
        FamilySpec(
            "para-quaternionic-inclusion",
            "orthogonal symmetric space included in sl(n+2,R)",
            "so(p+2,q) for c=1, so(p+1,q+1) for c=-1",
            "para-quaternionic n=p+q",
            orth_defaults,
            (SIZE_PQ,),
            lambda s: inclusion_blueprint(
                orthogonal_pair(int(s["c"]), _i(s, "p"), _i(s, "q")), build_graded("para-quaternionic", n=_n_orth(s))
            ),
            canonical=_canon_unique(),
            flat_sample=(),
            checks=_flat_only(True),
            pair_ids=ORTH,
            grading="para-quaternionic",
        ),
        FamilySpec(
            "dim3-sl3",
            "two-dimensional orthogonal space into sl(3,R), Lagrangean contact in dimension 3",
            "so(3)/so(2) for c=1, so(2,1)/so(1,1) for c=-1",
            "lagrangean n=1",
            (("c", F(1)),) + b_defaults,
            (DELTA,),
            _lag_orth_builder(DIM3_SL3_NAMES, True),
            _lag_orth_gauge(DIM3_SL3_NAMES, True),
            "t=|gamma/delta|, gamma=c*b1*b3+b2*b4, delta=b1*b4-b2*b3",
            _canon_lagrangean(True),
            (("c", F(-1)), ("b1", F(1)), ("b2", F(1)), ("b3", F(-1)), ("b4", F(1))),
            _lagrangean_checks(DIM3_SL3_NAMES, True),
            _orth_grid,
            pair_ids=ORTH,
            grading="lagrangean",
            t_point=_t_dim3_sl3,
        ),
        FamilySpec(
            "dim3-su21",
            "two-dimensional orthogonal space into su(2,1), CR in dimension 3",
            "so(3)/so(2) for c=1, so(2,1)/so(1,1) for c=-1",
            "cr p=1 q=0",
            (("c", F(1)),) + (("b1", F(1)), ("b2", F(0)), ("b3", F(0)), ("b4", F(1))),
            (DELTA,),
            lambda s: dim3_su21_blueprint(int(s["c"]), _bs(s)),
            lambda s: {"a1": F(0)},
            "s=(c*b1^2+b2^2+c*b3^2+b4^2)/|delta|",
            _canon_su21,
            (("c", F(1)), ("b1", F(1)), ("b2", F(0)), ("b3", F(0)), ("b4", F(1))),
            _su21_checks,
            _orth_grid,
            pair_ids=ORTH,
            grading="cr",
            t_point=_t_su21,
        ),
        FamilySpec(
            "dim3-sp4",
            "two-dimensional orthogonal space into sp(4,R), contact projective in dimension 3",
            "so(3)/so(2) for c=1, so(2,1)/so(1,1) for c=-1",
            "contact-projective n=1",
            (("c", F(1)),) + (("b1", F(1)), ("b2", F(0)), ("b3", F(0)), ("b4", F(1))),
            (DELTA,),
            lambda s: contact_projective_orthogonal_blueprint(int(s["c"]), 1, 0, _bs(s), DIM3_SP4_NAMES),
            lambda s: {"a1": F(0)},
            "none (all samples equivalent)",
            _canon_unique({"b1": F(1), "b2": F(0), "b3": F(0), "b4": F(1)}),
            (),
            _sp4_checks,
            _orth_grid,
            pair_ids=ORTH,
            grading="contact-projective",
        ),
        FamilySpec(
            "lagrangean-pgl",
            "sl(n+1,R) with gl(n,R) into sl(n+2,R), Lagrangean contact",
            "sl(n+1)",
            "lagrangean n",
            (("n", F(2)), ("b1", F(1)), ("b2", F(1))),
            (SIZE_N, Constraint("b_nonzero", "b1 != 0 and b2 != 0", lambda s: s["b1"] != 0 and s["b2"] != 0)),
            lambda s: lagrangean_pgl_blueprint(_i(s, "n"), s["b1"], s["b2"]),
            lambda s: {"c1": F(1, 2)},
            "none (all samples equivalent)",
            _canon_unique({"b1": F(1), "b2": F(1)}),
            (),
            _pgl_checks,
            pair_ids=("sl(n+1)",),
            grading="lagrangean",
        ),
        FamilySpec(
            "lagrangean-orthogonal",
            "orthogonal symmetric space into sl(n+2,R), Lagrangean contact",
            "so(p+2,q) for c=1, so(p+1,q+1) for c=-1",
            "lagrangean n=p+q",
            (("c", F(1)), ("p", F(2)), ("q", F(1))) + b_defaults,
            (SIZE_PQ, DELTA),
            _lag_orth_builder({}, False),
            _lag_orth_gauge({}, False),
            "t=|gamma/delta|, gamma=c*b1*b3+b2*b4, delta=b1*b4-b2*b3",
            _canon_lagrangean(False),
            (("b1", F(1)), ("b2", F(0)), ("b3", F(0)), ("b4", F(1))),
            _lagrangean_checks({}, False),
            _orth_grid,
            pair_ids=ORTH,
            grading="lagrangean",
            t_point=_t_lagrangean,
        ),
        FamilySpec(
            "cr-psu",
            "su(p+1,q) with u(p,q) into su(p+1,q+1), CR",
            "su(p+1,q)",
            "cr p q",
            (("p", F(1)), ("q", F(0)), ("br", F(1)), ("bi", F(0))),
            (SIZE_PQ, Constraint("b_nonzero", "b != 0", lambda s: s["br"] != 0 or s["bi"] != 0)),
            lambda s: cr_psu_blueprint(_i(s, "p"), _i(s, "q"), CPoly(s["br"], s["bi"])),
            lambda s: {"ci": F(0)},
            "none (all samples equivalent)",
            _canon_unique({"br": F(1), "bi": F(0)}),
            (),
            _psu_checks,
            pair_ids=("su(p+1,q)",),
            grading="cr",
        ),
        FamilySpec(
            "cr-orthogonal",
            "orthogonal symmetric space into su(p+1,q+1) via X1 + i X2, CR",
            "so(p+2,q) for c=1, so(p+1,q+1) for c=-1",
            "cr p q",
            (("c", F(-1)), ("p", F(1)), ("q", F(0)), ("b1r", F(2)), ("b1i", F(0)), ("b2r", F(0)), ("b2i", F(1))),
            (SIZE_PQ, CR_ORTH_NONZERO),
            lambda s: cr_orthogonal_blueprint(
                int(s["c"]), _i(s, "p"), _i(s, "q"), CPoly(s["b1r"], s["b1i"]), CPoly(s["b2r"], s["b2i"])
            ),
            lambda s: {"c1r": F(0)},
            "t: (|b1|^2+|b2|^2)/(|b1|^2-|b2|^2) for c=1, 2(Re b1 Im b2 - Re b2 Im b1)/(|b1|^2-|b2|^2) for c=-1",
            _canon_cr_orth,
            (("c", F(-1)), ("b1r", F(1)), ("b1i", F(0)), ("b2r", F(0)), ("b2i", F(0))),
            _cr_orth_checks,
            _orth_grid,
            pair_ids=ORTH,
            grading="cr",
            t_point=_cr_orth_point,
        ),
        FamilySpec(
            "cr-sostar",
            "so*(2n+2) into su(n+1,n+1) through a quaternionic multiple b of the identification, CR",
            "so*(2n+2)",
            "cr with middle [[0,-E],[-E,0]]",
            (("n", F(2)), ("b1", F(1)), ("b2", F(0)), ("b3", F(0)), ("b4", F(1))),
            (SIZE_N, B_NONZERO),
            lambda s: sostar_cr_blueprint(_i(s, "n"), _bs(s)),
            invariant="t=2(b1*b4-b2*b3)/|b|^2",
            canonical=_canon_sostar_cr,
            flat_sample=(("b1", F(1)), ("b2", F(0)), ("b3", F(0)), ("b4", F(0))),
            checks=_sostar_cr_checks,
            pair_ids=("so*(2n+2)",),
            grading="cr",
            t_point=_sostar_t_point,
        ),
        FamilySpec(
            "ctproj-orthogonal",
            "orthogonal symmetric space into sp(2n+2,R), contact projective",
            "so(p+2,q) for c=1, so(p+1,q+1) for c=-1",
            "contact-projective n=p+q",
            (("c", F(1)), ("p", F(2)), ("q", F(0))) + (("b1", F(1)), ("b2", F(0)), ("b3", F(0)), ("b4", F(1))),
            (SIZE_PQ, DELTA),
            lambda s: contact_projective_orthogonal_blueprint(int(s["c"]), _i(s, "p"), _i(s, "q"), _bs(s), {}),
            lambda s: {"c1": F(0)},
            "none (all samples equivalent)",
            _canon_unique({"b1": F(1), "b2": F(0), "b3": F(0), "b4": F(1)}),
            (("p", F(1)), ("q", F(0))),
            _ctproj_checks,
            _orth_grid,
            pair_ids=ORTH,
            grading="contact-projective",
        ),
        FamilySpec(
            "ctproj-sostar",
            "so*(2n+2) into sp(4n+2,R) through a Darboux identification and a quaternionic multiple b",
            "so*(2n+2)",
            "contact-projective 2n",
            (("n", F(2)), ("b1", F(1)), ("b2", F(0)), ("b3", F(0)), ("b4", F(0))),
            (SIZE_N, B_NONZERO),
            lambda s: sostar_ctproj_blueprint(_i(s, "n"), _bs(s)),
            invariant="none (all samples equivalent)",
            canonical=_canon_unique({"b1": F(1), "b2": F(0), "b3": F(0), "b4": F(0)}),
            checks=_flat_only(False),
            pair_ids=("so*(2n+2)",),
            grading="contact-projective",
        ),
    )


_FAMILIES: Optional[Tuple[FamilySpec, ...]] = None


def list_families() -> List[FamilySpec]:
    global _FAMILIES
    if _FAMILIES is None:
        _FAMILIES = _families()
    return list(_FAMILIES)


def export_family_table() -> Dict[str, object]:
    """The family records in the layout of ``data/families.json``."""
    return {
        "schema": 1,
        "description": "Extension families: parameters with defaults, admissibility rules, source pairs and target gradings.",
        "families": [spec.summary_record() for spec in list_families()],
    }


def load_family_table() -> Dict[str, object]:
    """The bundled family table (rationals decoded)."""
    text = resources.files("cartanext").joinpath("data/families.json").read_text(encoding="utf-8")
    return jsonio.loads(text)


def get_family(family_id: str) -> FamilySpec:
    for spec in list_families():
        if spec.family_id == family_id:
            return spec
    raise KeyError(f"unknown family {family_id!r}")


# ---------------------------------------------------------------------------
# instantiation and solving


def instantiate(spec: FamilySpec, sample: Optional[Mapping[str, object]] = None) -> Extension:
    """Validated extension of the family at ``sample``; solve-names stay symbolic."""
    s = complete_sample(spec, sample)
    bp = spec.builder(s)
    images, assign, free = resolve_aux(bp)
    notes = tuple(bp.notes) + tuple(f"{k} = {v}" for k, v in sorted(assign.items()))
    ext = Extension.from_images(
        bp.pair.alg,
        bp.isotropy,
        bp.frame,
        bp.target,
        images,
        h0=bp.h0,
        i_h0=bp.i_h0,
        solve_names=tuple(bp.solve_names) + tuple(u for u in free if u not in bp.solve_names),
        product_names=bp.product_names,
        contact=bp.contact,
        label=spec.family_id,
        pair=bp.pair,
        notes=notes,
    )
    require_valid(ext)
    return ext


_SOLVED_CACHE: Dict[tuple, SolvedFamily] = {}


def solve_family(spec: FamilySpec, sample: Optional[Mapping[str, object]] = None) -> SolvedFamily:
    """Instantiate, solve normality, apply the gauge and zero any leftover freedom.

    Results are cached per (family, completed sample) and shared; treat them
    as read-only.
    """
    s = complete_sample(spec, sample)
    key = (spec.family_id, tuple(sorted(s.items())))
    if key not in _SOLVED_CACHE:
        _SOLVED_CACHE[key] = _solve_family(spec, s)
    return _SOLVED_CACHE[key]


def _solve_family(spec: FamilySpec, s: Dict[str, Fraction]) -> SolvedFamily:
    ext = instantiate(spec, s)
    gauge = {k: v for k, v in spec.gauge(s).items() if k in ext.solve_names}
    sol = solve_normality(ext, prefer_free=tuple(gauge))
    if any(k not in sol.free for k in gauge):
        # a gauge name was forced by normality: solve again with the gauge imposed
        forced = solve_normality(ext.substitute(gauge))
        if not forced.verified:
            raise NormalityError("gauge is incompatible with normality")
        values = dict(forced.assignments)
        free = list(forced.free)
    else:
        values = sol.substituted(gauge)
        free = [u for u in sol.free if u not in gauge]
    zeroed = sorted(free)
    zeros = {u: 0 for u in zeroed}
    values = {k: v.subs(zeros) for k, v in values.items()}
    values.update({u: PolyExpr.const(0) for u in zeroed})
    for k, v in gauge.items():
        values[k] = PolyExpr.const(v)
    solved_ext = ext.substitute(values)
    return SolvedFamily(spec, s, ext, sol, gauge, zeroed, values, solved_ext)


def canonical_reduce(spec: FamilySpec, sample: Optional[Mapping[str, object]] = None) -> CanonicalForm:
    s = complete_sample(spec, sample)
    if spec.canonical is None:
        return CanonicalForm("unknown", spec.invariant, None, None, False, "no reduction rule")
    return spec.canonical(s)


def closed_form_checks(solved: SolvedFamily) -> List[ClosedFormCheck]:
    if solved.spec.checks is None:
        return []
    return solved.spec.checks(solved.sample, solved)


# ---------------------------------------------------------------------------
# equivalence search


def _target_structure(g: GradedAlgebra) -> List[Mat]:
    """Matrices a p0 has to commute with (complex or quaternionic structure)."""
    size = g.alg.size
    if g.scalar == "C":
        return [Mat.block_diag([Mat([[0, -1], [1, 0]])] * (size // 2))]
    if g.scalar == "H":
        return [Mat.block_diag([quaternion_right_matrix(u)] * (size // 4)) for u in ([0, 1, 0, 0], [0, 0, 1, 0])]
    return []


def _block_of(g: GradedAlgebra, idx: int) -> int:
    pos = idx // field_width(g.scalar)
    acc = 0
    for b, size in enumerate(g.blocks):
        acc += size
        if pos < acc:
            return b
    raise IndexError(idx)


def _solve_p0(e1: Extension, e2: Extension, sigma: Mat) -> List[Mat]:
    """Basis of matrices P with P alpha2(X) = alpha1(sigma X) P, P i2 = i1 P,
    block upper triangular and commuting with the target scalar structure."""
    g = e1.target
    size = g.alg.size
    allowed = [(r, c) for r in range(size) for c in range(size) if _block_of(g, r) <= _block_of(g, c)]
    index = {rc: k for k, rc in enumerate(allowed)}
    nv = len(allowed)
    rows: List[List[Fraction]] = []

    def add_relation(left: Mat, right: Mat) -> None:
        # P left - right P = 0
        for r in range(size):
            for c in range(size):
                row = [F(0)] * nv
                for k in range(size):
                    if (r, k) in index and left[k, c]:
                        row[index[(r, k)]] += left[k, c]
                    if (k, c) in index and right[r, k]:
                        row[index[(k, c)]] -= right[r, k]
                if any(row):
                    rows.append(row)

    n = e1.dim_source
    for k in range(n):
        a2 = e2.target.alg.element([x.constant_value() for x in e2.alpha[k]])
        col = [sigma[i, k] for i in range(n)]
        a1 = e1.target.alg.element([x.constant_value() for x in e1.alpha_of(col)])
        add_relation(a2, a1)
    if e1.i_h0 is not None and e2.i_h0 is not None:
        add_relation(e2.i_h0, e1.i_h0)
    for j in _target_structure(g):
        add_relation(j, j)
    basis = nullspace(rows, nv)
    out = []
    for vec in basis:
        m = [[F(0)] * size for _ in range(size)]
        for (r, c), k in index.items():
            m[r][c] = vec[k]
        out.append(Mat(m))
    return out


def _candidates(basis: List[Mat]) -> List[Mat]:
    if not basis:
        return []
    out = list(basis)
    combo = basis[0]
    for k, b in enumerate(basis[1:], start=2):
        combo = combo + b.scale(k)
    out.append(combo)
    return out


def _is_target_automorphism(g: GradedAlgebra, p: Mat) -> bool:
    inv = p.inverse()
    return all(g.alg.contains(p @ b @ inv) for b in g.alg.basis)


def equivalent_under_morphism(e1: Extension, e2: Extension, grid: Sequence[Mat]) -> Optional[Witness]:
    """Search (p0, sigma) with e2 = apply_morphism(e1, p0, sigma) over ``grid``.

    ``grid`` lists source group elements; the identity is always tried first.
    Both extensions must be fully numeric.  ``None`` only means that no
    witness was found among the candidates.
    """
    if e1.source_alg.basis != e2.source_alg.basis or e1.target.alg.basis != e2.target.alg.basis:
        raise ExtensionError("morphism", "extensions have different source or target")
    size_src = e1.source_alg.basis[0].rows
    elements = [Mat.identity(size_src)] + [g for g in grid if g != Mat.identity(size_src)]
    for elt in elements:
        try:
            sigma = adjoint_coords(e1.source_alg, elt)
        except (AlgebraError, ZeroDivisionError):
            continue
        for p in _candidates(_solve_p0(e1, e2, sigma)):
            if p.rank() != p.rows or not filtration_preserving(e1.target, p):
                continue
            if not _is_target_automorphism(e1.target, p):
                continue
            try:
                moved = apply_morphism(e1, p, sigma_element=elt)
            except ExtensionError:
                continue
            if moved.alpha == e2.alpha:
                return Witness(p, elt)
    return None
