"""Block-matrix gradings of real simple Lie algebras.

Degrees come from block positions: entry (r, c) of a block matrix has degree
``block(c) - block(r)``, so strictly lower blocks are negative.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .exactmath import Mat, PolyExpr, field_width, rank, realify, solve_linear
from .liealg import AlgebraError, BasisAlgebra, linear_matrix_algebra, span_rref

__all__ = [
    "GradedAlgebra",
    "DualBases",
    "GRADED_FAMILIES",
    "build_graded",
    "project_degree",
    "sigma_involution",
    "dual_bases",
    "grading_element",
    "grading_invariant_report",
    "hermitian_form",
    "symplectic_form",
    "conformal_form",
    "quaternion_right_matrix",
]

Vec = List[Fraction]


@dataclass
class DualBases:
    minus_basis: List[Vec]
    plus_basis: List[Vec]


@dataclass
class GradedAlgebra:
    alg: BasisAlgebra
    k: int
    degree: List[int]
    blocks: Tuple[int, ...]
    family: str
    params: Dict[str, int]
    scalar: str = "R"
    form: Optional[Mat] = None
    grading_element: Vec = field(default_factory=list)
    _duals: Optional[DualBases] = None

    @property
    def dim(self) -> int:
        return self.alg.dim

    def indices(self, d: int) -> List[int]:
        return [i for i, x in enumerate(self.degree) if x == d]

    def component_dims(self) -> Tuple[int, ...]:
        return tuple(len(self.indices(d)) for d in range(-self.k, self.k + 1))

    @property
    def minus_indices(self) -> List[int]:
        return [i for i, x in enumerate(self.degree) if x < 0]

    @property
    def p_indices(self) -> List[int]:
        return [i for i, x in enumerate(self.degree) if x >= 0]

    def degree_of(self, x: Sequence) -> Optional[int]:
        """Degree if x is homogeneous and nonzero, else None."""
        degs = {self.degree[i] for i, c in enumerate(x) if c}
        return degs.pop() if len(degs) == 1 else None

    def min_degree(self, x: Sequence) -> Optional[int]:
        degs = [self.degree[i] for i, c in enumerate(x) if c]
        return min(degs) if degs else None

    def in_p(self, x: Sequence) -> bool:
        return all(not c for i, c in enumerate(x) if self.degree[i] < 0)

    def real_block_of(self, idx: int) -> int:
        w = field_width(self.scalar)
        pos = idx // w
        acc = 0
        for b, size in enumerate(self.blocks):
            acc += size
            if pos < acc:
                return b
        raise IndexError(idx)

    def sigma_element(self) -> Mat:
        """Block diagonal matrix acting as (-1)^degree under conjugation."""
        signs = []
        w = field_width(self.scalar)
        for b, size in enumerate(self.blocks):
            signs += [(-1) ** b] * (size * w)
        return Mat.diag(signs)

    @property
    def duals(self) -> DualBases:
        if self._duals is None:
            self._duals = dual_bases(self)
        return self._duals


def _block_index(blocks: Sequence[int], width: int):
    starts = []
    acc = 0
    for size in blocks:
        starts.append(acc)
        acc += size * width
    total = acc

    def which(i: int) -> int:
        for b in range(len(blocks) - 1, -1, -1):
            if i >= starts[b]:
                return b
        raise IndexError(i)

    return which, total


def _entry_degree(blocks: Sequence[int], width: int):
    which, _ = _block_index(blocks, width)
    return lambda r, c: which(c) - which(r)


def quaternion_right_matrix(q: Sequence[int]) -> Mat:
    """4x4 real matrix of right multiplication by q on H = R^4."""
    cols = []
    for e in range(4):
        x = [0, 0, 0, 0]
        x[e] = 1
        cols.append(_qmul(x, q))
    return Mat([[cols[j][i] for j in range(4)] for i in range(4)])


def _qmul(p: Sequence, q: Sequence) -> List:
    a1, b1, c1, d1 = p
    a2, b2, c2, d2 = q
    return [
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    ]


def conformal_form(signs: Sequence[int]) -> Mat:
    """Symmetric form with anti-diagonal hyperbolic pair around diag(signs)."""
    n = len(signs)
    m = [[0] * (n + 2) for _ in range(n + 2)]
    m[0][n + 1] = m[n + 1][0] = 1
    for i, s in enumerate(signs):
        m[i + 1][i + 1] = s
    return Mat(m)


def hermitian_form(middle: Mat) -> Mat:
    """Complex Hermitian form [[0,0,1],[0,middle,0],[1,0,0]] (real middle)."""
    n = middle.rows
    m = [[Fraction(0)] * (n + 2) for _ in range(n + 2)]
    m[0][n + 1] = m[n + 1][0] = Fraction(1)
    for i in range(n):
        for j in range(n):
            m[i + 1][j + 1] = middle[i, j]
    return Mat(m)


def symplectic_form(n: int) -> Mat:
    """x0 y_{2n+1} - x_{2n+1} y0 + sum(x_i y_{n+i} - x_{n+i} y_i)."""
    size = 2 * n + 2
    m = [[0] * size for _ in range(size)]
    m[0][size - 1] = 1
    m[size - 1][0] = -1
    for i in range(1, n + 1):
        m[i][n + i] = 1
        m[n + i][i] = -1
    return Mat(m)


def _complex_realified(m: Mat) -> Mat:
    return realify("C", [[(m[i, j], 0) for j in range(m.cols)] for i in range(m.rows)])


def _signs(p: int, q: int) -> List[int]:
    return [1] * p + [-1] * q


def _check_sizes(**kw) -> None:
    for name, v in kw.items():
        if not isinstance(v, int) or v < 0:
            raise ValueError(f"parameter {name} must be a non-negative integer")


def _sl_conditions(size: int):
    return lambda m: [Mat([[m.trace()]])]


def _build(family: str, params: Dict[str, int]):
    """(basis, degrees, blocks, field, form) for a family."""
    if family == "projective":
        n = params["n"]
        _check_sizes(n=n)
        if n < 1:
            raise ValueError("n must be positive")
        blocks = (1, n)
        basis, degs = linear_matrix_algebra(n + 1, _sl_conditions(n + 1), _entry_degree(blocks, 1))
        return basis, degs, blocks, "R", None
    if family in ("para-quaternionic", "lagrangean"):
        n = params["n"]
        _check_sizes(n=n)
        if n < 1:
            raise ValueError("n must be positive")
        blocks = (2, n) if family == "para-quaternionic" else (1, n, 1)
        basis, degs = linear_matrix_algebra(n + 2, _sl_conditions(n + 2), _entry_degree(blocks, 1))
        return basis, degs, blocks, "R", None
    if family == "conformal":
        signs = list(params.get("signs") or _signs(params["p"], params["q"]))
        if not signs:
            raise ValueError("conformal grading needs p+q >= 1")
        form = conformal_form(signs)
        blocks = (1, len(signs), 1)
        basis, degs = linear_matrix_algebra(
            len(signs) + 2, lambda m: [m.T() @ form + form @ m], _entry_degree(blocks, 1)
        )
        return basis, degs, blocks, "R", form
    if family == "contact-projective":
        n = params["n"]
        _check_sizes(n=n)
        if n < 1:
            raise ValueError("n must be positive")
        form = symplectic_form(n)
        blocks = (1, 2 * n, 1)
        basis, degs = linear_matrix_algebra(
            2 * n + 2, lambda m: [m.T() @ form + form @ m], _entry_degree(blocks, 1)
        )
        return basis, degs, blocks, "R", form
    if family == "cr":
        if "middle" in params and params["middle"] is not None:
            middle = params["middle"]
        else:
            middle = Mat.diag(_signs(params["p"], params["q"]))
        n = middle.rows
        if n < 1:
            raise ValueError("CR grading needs p+q >= 1")
        herm = hermitian_form(middle)
        real_form = _complex_realified(herm)
        size = 2 * (n + 2)
        cplx = realify("C", [[(0, 1) if i == j else (0, 0) for j in range(n + 2)] for i in range(n + 2)])

        def cond(m: Mat):
            im_trace = sum((m[2 * i + 1, 2 * i] for i in range(n + 2)), Fraction(0))
            return [m @ cplx - cplx @ m, m.T() @ real_form + real_form @ m, Mat([[m.trace(), im_trace]])]

        blocks = (1, n, 1)
        basis, degs = linear_matrix_algebra(size, cond, _entry_degree(blocks, 2))
        return basis, degs, blocks, "C", herm
    if family == "quaternionic":
        n = params["n"]
        _check_sizes(n=n)
        if n < 1:
            raise ValueError("n must be positive")
        size = 4 * (n + 1)
        right = [
            Mat.block_diag([quaternion_right_matrix(u)] * (n + 1))
            for u in ([0, 1, 0, 0], [0, 0, 1, 0])
        ]

        def cond(m: Mat):
            return [m @ r - r @ m for r in right] + [Mat([[m.trace()]])]

        blocks = (1, n)
        basis, degs = linear_matrix_algebra(size, cond, _entry_degree(blocks, 4))
        return basis, degs, blocks, "H", None
    raise ValueError(f"unknown graded family {family!r}")


GRADED_FAMILIES = (
    "projective",
    "conformal",
    "quaternionic",
    "para-quaternionic",
    "lagrangean",
    "cr",
    "contact-projective",
)


_GRADED_CACHE: Dict[tuple, GradedAlgebra] = {}


def build_graded(family: str, **params) -> GradedAlgebra:
    """Graded algebra for one of :data:`GRADED_FAMILIES`; invariants are checked.

    Results for hashable parameters are cached and shared, so callers must
    not mutate them.
    """
    try:
        key = (family, tuple(sorted(params.items())))
        hash(key)
    except TypeError:
        key = None
    if key is not None and key in _GRADED_CACHE:
        return _GRADED_CACHE[key]
    g = _build_graded(family, params)
    if key is not None:
        _GRADED_CACHE[key] = g
    return g


def _build_graded(family: str, params: Dict[str, object]) -> GradedAlgebra:
    basis, degs, blocks, fld, form = _build(family, params)
    alg = BasisAlgebra(basis)
    k = max(abs(d) for d in degs)
    g = GradedAlgebra(alg, k, list(degs), tuple(blocks), family, dict(params), fld, form)
    g.grading_element = grading_element(g)
    report = grading_invariant_report(g)
    failed = [name for name, ok in report.items() if not ok]
    if failed:
        raise AlgebraError(f"grading invariants fail: {', '.join(failed)}")
    return g


def project_degree(g: GradedAlgebra, x: Sequence, i: int) -> List:
    zero = PolyExpr.const(0) if any(isinstance(c, PolyExpr) for c in x) else Fraction(0)
    return [c if g.degree[j] == i else zero for j, c in enumerate(x)]


def sigma_involution(g: GradedAlgebra) -> Mat:
    """Matrix (on coordinates) of the map acting as (-1)^i on degree i."""
    return Mat.diag([(-1) ** (d % 2) for d in g.degree])


def grading_element(g: GradedAlgebra) -> Vec:
    zero_idx = g.indices(0)
    e = g.alg.unit_vectors()
    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    for j in range(g.dim):
        cols = [g.alg.bracket(e[a], e[j]) for a in zero_idx]
        for k in range(g.dim):
            rows.append([c[k] for c in cols])
            rhs.append(Fraction(g.degree[j]) if k == j else Fraction(0))
    sol = solve_linear(rows, rhs)
    if sol is None:
        raise AlgebraError("no grading element: grading inconsistent")
    out = [Fraction(0)] * g.dim
    for a, v in zip(zero_idx, sol):
        out[a] = v
    return out


def dual_bases(g: GradedAlgebra) -> DualBases:
    minus = g.minus_indices
    plus = [i for i, d in enumerate(g.degree) if d > 0]
    kill = g.alg.killing
    pairing = Mat([[kill[i, j] for j in plus] for i in minus])
    if pairing.rows != pairing.cols or pairing.rank() != pairing.rows:
        raise AlgebraError("Killing pairing between negative and positive parts is singular")
    # Z_j = sum_k C[k][j] e_{plus[k]} with pairing @ C = identity
    inv = pairing.inverse()
    e = g.alg.unit_vectors()
    minus_basis = [e[i] for i in minus]
    plus_basis = []
    for j in range(len(minus)):
        z = [Fraction(0)] * g.dim
        for k, idx in enumerate(plus):
            z[idx] = inv[k, j]
        plus_basis.append(z)
    return DualBases(minus_basis, plus_basis)


def grading_invariant_report(g: GradedAlgebra) -> Dict[str, bool]:
    alg = g.alg
    e = alg.unit_vectors()
    report: Dict[str, bool] = {}
    ok = True
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            target = g.degree[i] + g.degree[j]
            for kk, c in alg.structure[i][j].items():
                if g.degree[kk] != target:
                    ok = False
    report["bracket_respects_degree"] = ok
    # negative part generated by degree -1
    gen = span_rref([e[i] for i in g.indices(-1)])
    while True:
        new = span_rref(gen + [alg.bracket(u, v) for u in gen for v in gen])
        if len(new) == len(gen):
            break
        gen = new
    report["minus_one_generates"] = len(gen) == len(g.minus_indices)
    kill = alg.killing
    orth = all(
        kill[i, j] == 0
        for i in range(g.dim)
        for j in range(g.dim)
        if g.degree[i] + g.degree[j] != 0
    )
    report["killing_orthogonality"] = orth
    pair_ok = True
    for d in range(1, g.k + 1):
        a, b = g.indices(-d), g.indices(d)
        if len(a) != len(b) or rank([[kill[i, j] for j in b] for i in a]) != len(a):
            pair_ok = False
    report["killing_pairs_opposite_degrees"] = pair_ok
    ge = g.grading_element
    report["grading_element"] = all(
        alg.bracket(ge, e[j]) == [Fraction(g.degree[j]) * x for x in e[j]] for j in range(g.dim)
    )
    if g.k == 2:
        top = g.indices(-2)
        report["contact_top_is_line"] = len(top) == 1
        if len(top) == 1:
            m1 = g.indices(-1)
            omega = [[alg.bracket(e[a], e[b])[top[0]] for b in m1] for a in m1]
            report["contact_nondegenerate"] = rank(omega) == len(m1)
    return report


def contact_omega(g: GradedAlgebra) -> Mat:
    """Skew form on degree -1 given by the bracket into the degree -2 line."""
    alg = g.alg
    e = alg.unit_vectors()
    top = g.indices(-2)[0]
    m1 = g.indices(-1)
    return Mat([[alg.bracket(e[a], e[b])[top] for b in m1] for a in m1])
