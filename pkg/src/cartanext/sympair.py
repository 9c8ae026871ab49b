"""Symmetric pairs (k, l, h0) in explicit block realizations.

``h_span`` is the +1 eigenspace of Ad(h0) and ``m_span`` the -1 eigenspace.
The basis of k is always ordered as [semisimple part of l, central line of l
(if any), m].
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Dict, List, Optional, Sequence, Tuple

from .exactmath import Mat, rank, realify, signature_of_symmetric, to_rational
from .liealg import (
    AlgebraError,
    BasisAlgebra,
    centralizer_fixed_space,
    derived_span,
    is_subalgebra,
    largest_ideal_in,
    linear_matrix_algebra,
    span_rref,
)

__all__ = [
    "SymmetricPair",
    "ContactReduction",
    "PAIR_IDS",
    "build_pair",
    "contact_reduce",
    "killing_signature_on_m",
    "is_effective",
    "load_pair_table",
    "complex_entries_realify",
    "quaternionic_to_complex_basis",
]

Vec = List[Fraction]


@dataclass
class SymmetricPair:
    pair_id: str
    params: Dict[str, int]
    alg: BasisAlgebra
    h_span: List[Vec]
    m_span: List[Vec]
    h0: Mat
    semisimple_span: Optional[List[Vec]] = None
    line: Optional[Vec] = None
    realization: str = "real"

    @property
    def dim(self) -> int:
        return self.alg.dim

    def frame_indices(self, contact: bool) -> List[int]:
        """Basis indices complementing the isotropy algebra (line first for contact)."""
        m = [i for i, v in enumerate(self.alg.unit_vectors()) if v in self.m_span]
        if contact:
            if self.line is None:
                raise AlgebraError("pair has no designated central line")
            return [self.line.index(1)] + m
        return m


@dataclass
class ContactReduction:
    pair: SymmetricPair
    h_span: List[Vec]
    line: Vec
    m_span: List[Vec]
    bracket_to_line: Mat = field(default_factory=lambda: Mat.zeros(0))


def _unit(dim: int, i: int) -> Vec:
    return [Fraction(int(j == i)) for j in range(dim)]


def _assemble(pair_id, params, hss: List[Mat], line: Optional[Mat], m: List[Mat], h0: Mat, names, realization="real"):
    basis = hss + ([line] if line is not None else []) + m
    alg = BasisAlgebra(basis, names)
    d = alg.dim
    nh = len(hss) + (1 if line is not None else 0)
    h_span = [_unit(d, i) for i in range(nh)]
    m_span = [_unit(d, i) for i in range(nh, d)]
    pair = SymmetricPair(
        pair_id,
        dict(params),
        alg,
        h_span,
        m_span,
        h0,
        semisimple_span=[_unit(d, i) for i in range(len(hss))],
        line=_unit(d, len(hss)) if line is not None else None,
        realization=realization,
    )
    _check_pair(pair)
    return pair


def _check_pair(pair: SymmetricPair) -> None:
    plus, minus = centralizer_fixed_space(pair.alg, pair.h0)
    if span_rref(plus) != span_rref(pair.h_span) or span_rref(minus) != span_rref(pair.m_span):
        raise AlgebraError("h0 eigenspaces do not match the declared splitting")
    if not is_subalgebra(pair.alg, pair.h_span):
        raise AlgebraError("isotropy part is not a subalgebra")


# ---------------------------------------------------------------------------
# orthogonal pairs  so(p+2,q) (c=1) and so(p+1,q+1) (c=-1)


def orthogonal_element(c: int, signs: Sequence[int], a, x: Sequence, y: Sequence, amat=None) -> Mat:
    """[[0, a, -x^T I], [-c a, 0, -c y^T I], [x, y, A]] with I = diag(signs)."""
    n = len(signs)
    m = [[Fraction(0)] * (n + 2) for _ in range(n + 2)]
    m[0][1] = to_rational(a)
    m[1][0] = -c * to_rational(a)
    for i in range(n):
        m[0][2 + i] = -to_rational(x[i]) * signs[i]
        m[1][2 + i] = -c * to_rational(y[i]) * signs[i]
        m[2 + i][0] = to_rational(x[i])
        m[2 + i][1] = to_rational(y[i])
        if amat is not None:
            for j in range(n):
                m[2 + i][2 + j] = to_rational(amat[i][j])
    return Mat(m)


def _orthogonal(c: int, p: int, q: int, pair_id: str) -> SymmetricPair:
    n = p + q
    if n < 1:
        raise ValueError("need p+q >= 1")
    signs = [1] * p + [-1] * q
    zero = [0] * n
    hss, names = [], []
    for i in range(n):
        for j in range(i + 1, n):
            a = [[0] * n for _ in range(n)]
            a[i][j] = 1
            a[j][i] = -signs[i] * signs[j]
            hss.append(orthogonal_element(c, signs, 0, zero, zero, a))
            names.append(f"A{i + 1}{j + 1}")
    line = orthogonal_element(c, signs, 1, zero, zero)
    names.append("a")
    m = []
    for i in range(n):
        m.append(orthogonal_element(c, signs, 0, [int(k == i) for k in range(n)], zero))
        names.append(f"x{i + 1}")
    for i in range(n):
        m.append(orthogonal_element(c, signs, 0, zero, [int(k == i) for k in range(n)]))
        names.append(f"y{i + 1}")
    h0 = Mat.diag([1, 1] + [-1] * n)
    return _assemble(pair_id, {"c": c, "p": p, "q": q}, hss, line, m, h0, names)


# ---------------------------------------------------------------------------
# sl(n+1,R) with l = gl(n)


def _sl_model(n: int) -> SymmetricPair:
    if n < 1:
        raise ValueError("n must be positive")
    size = n + 1
    hss, names = [], []
    for i in range(1, size):
        for j in range(1, size):
            if i != j:
                hss.append(Mat.unit(size, i, j))
                names.append(f"E{i}{j}")
    for i in range(1, n):
        hss.append(Mat.unit(size, i, i) - Mat.unit(size, i + 1, i + 1))
        names.append(f"H{i}")
    line = Mat.diag([1] + [Fraction(-1, n)] * n)
    names.append("a")
    m = []
    for i in range(1, size):
        m.append(Mat.unit(size, i, 0))
        names.append(f"x{i}")
    for i in range(1, size):
        m.append(Mat.unit(size, 0, i))
        names.append(f"y{i}")
    h0 = Mat.diag([1] + [-1] * n)
    return _assemble("sl(n+1)", {"n": n}, hss, line, m, h0, names)


# ---------------------------------------------------------------------------
# complex helpers


def complex_entries_realify(entries: Sequence[Sequence[Tuple]]) -> Mat:
    """Realify a matrix whose entries are (re, im) pairs."""
    return realify("C", entries)


def _complex_unit(size: int, i: int, j: int, value=(1, 0)) -> List[List[Tuple]]:
    return [[value if (r, c) == (i, j) else (0, 0) for c in range(size)] for r in range(size)]


def _cadd(*mats):
    size = len(mats[0])
    out = [[(Fraction(0), Fraction(0)) for _ in range(size)] for _ in range(size)]
    for m in mats:
        for r in range(size):
            for c in range(size):
                out[r][c] = (out[r][c][0] + to_rational(m[r][c][0]), out[r][c][1] + to_rational(m[r][c][1]))
    return out


def _su_model(p: int, q: int) -> SymmetricPair:
    """su(p+1,q) with l = u(p,q); Hermitian form diag(1, I_{p,q})."""
    n = p + q
    if n < 1:
        raise ValueError("need p+q >= 1")
    signs = [1] * p + [-1] * q
    size = n + 1
    hss, names = [], []
    # su(p,q) on the lower block
    for i in range(n):
        for j in range(i + 1, n):
            s = signs[i] * signs[j]
            re = _cadd(_complex_unit(size, i + 1, j + 1), _complex_unit(size, j + 1, i + 1, (-s, 0)))
            im = _cadd(_complex_unit(size, i + 1, j + 1, (0, 1)), _complex_unit(size, j + 1, i + 1, (0, s)))
            hss += [complex_entries_realify(re), complex_entries_realify(im)]
            names += [f"R{i + 1}{j + 1}", f"I{i + 1}{j + 1}"]
    for i in range(n - 1):
        d = _cadd(_complex_unit(size, i + 1, i + 1, (0, 1)), _complex_unit(size, i + 2, i + 2, (0, -1)))
        hss.append(complex_entries_realify(d))
        names.append(f"D{i + 1}")
    line_entries = [[(0, 0)] * size for _ in range(size)]
    line_entries[0][0] = (0, 1)
    for i in range(1, size):
        line_entries[i][i] = (0, Fraction(-1, n))
    line = complex_entries_realify(line_entries)
    names.append("a")
    m = []
    for part, tag in (((1, 0), "xr"), ((0, 1), "xi")):
        for j in range(n):
            x = _complex_unit(size, j + 1, 0, part)
            # top row is -conj(x)^T I
            s = signs[j]
            x[0][j + 1] = (-part[0] * s, part[1] * s)
            m.append(complex_entries_realify(x))
            names.append(f"{tag}{j + 1}")
    h0 = complex_entries_realify([[(1 if r == c == 0 else (-1 if r == c else 0), 0) for c in range(size)] for r in range(size)])
    return _assemble("su(p+1,q)", {"p": p, "q": q}, hss, line, m, h0, names, realization="complex")


# ---------------------------------------------------------------------------
# so*(2n+2) with l = so*(2) + so*(2n)


def quaternionic_to_complex_basis(m: int) -> Mat:
    """Real change of coordinates from complex (u; v) form to quaternionic form.

    A vector u + j v of H^m (u, v in C^m) has quaternion coordinates
    (Re u, Im u, Re v, -Im v).  Returns T with x_quat = T x_cplx, where
    x_cplx lists (Re u_i, Im u_i) for i < m and then (Re v_i, Im v_i).
    """
    size = 4 * m
    t = [[0] * size for _ in range(size)]
    for i in range(m):
        t[4 * i][2 * i] = 1
        t[4 * i + 1][2 * i + 1] = 1
        t[4 * i + 2][2 * (m + i)] = 1
        t[4 * i + 3][2 * (m + i) + 1] = -1
    return Mat(t)


def _sostar(n: int, realization: str) -> SymmetricPair:
    if n < 1:
        raise ValueError("n must be positive")
    m = n + 1
    size = 2 * m
    rsize = 2 * size
    cplx = realify("C", [[(0, 1) if i == j else (0, 0) for j in range(size)] for i in range(size)])
    conj = Mat.diag([1, -1] * size)
    jq = [[(0, 0)] * size for _ in range(size)]
    for i in range(m):
        jq[i][m + i] = (-1, 0)
        jq[m + i][i] = (1, 0)
    jq_r = realify("C", jq)

    def block_swap(x: Mat) -> Mat:
        out = [[Fraction(0)] * rsize for _ in range(rsize)]
        for bi in range(size):
            for bj in range(size):
                for a in range(2):
                    for b in range(2):
                        out[2 * bi + a][2 * bj + b] = x[2 * bj + a, 2 * bi + b]
        return Mat(out)

    def cond(x: Mat):
        return [x @ cplx - cplx @ x, x + block_swap(x), x @ jq_r - jq_r @ conj @ x @ conj]

    def isotropy_block(ci: int) -> int:
        return 0 if ci % m == 0 else 1

    basis, classes = linear_matrix_algebra(
        rsize, cond, lambda r, c: (isotropy_block(r // 2) + isotropy_block(c // 2)) % 2
    )
    l_basis = [b for b, k in zip(basis, classes) if k == 0]
    m_basis = [b for b, k in zip(basis, classes) if k == 1]
    sign = [-1 if (i % m == 0) else 1 for i in range(size)]
    h0 = realify("C", [[(sign[r] if r == c else 0, 0) for c in range(size)] for r in range(size)])
    # split l into so*(2) (supported on the isotropy indices 0, m) and so*(2n)
    corner = {0, m}
    line = [b for b in l_basis if all(b[r, c] == 0 for r in range(rsize) for c in range(rsize) if (r // 2 not in corner or c // 2 not in corner))]
    hss = [b for b in l_basis if b not in line]
    if len(line) != 1:
        raise AlgebraError("unexpected so*(2) part")
    if realization == "quaternionic":
        t = quaternionic_to_complex_basis(m)
        ti = t.inverse()
        conv = lambda x: t @ x @ ti
        hss = [conv(b) for b in hss]
        line = [conv(b) for b in line]
        m_basis = [conv(b) for b in m_basis]
        h0 = conv(h0)
    elif realization != "complex":
        raise ValueError(f"unknown realization {realization!r}")
    names = [f"h{i}" for i in range(len(hss))] + ["a"] + [f"m{i}" for i in range(len(m_basis))]
    return _assemble("so*(2n+2)", {"n": n}, hss, line[0], m_basis, h0, names, realization=realization)


PAIR_IDS = (
    "so(p+2,q)",
    "so(p+1,q+1)",
    "su(p+1,q)",
    "sl(n+1)",
    "so*(2n+2)",
    "so(3)/so(2)",
    "so(2,1)/so(1,1)",
)


_PAIR_CACHE: Dict[tuple, SymmetricPair] = {}


def build_pair(pair_id: str, **params) -> SymmetricPair:
    """Symmetric pair from :data:`PAIR_IDS` with integer parameters (cached, shared)."""
    key = (pair_id, tuple(sorted(params.items())))
    if key not in _PAIR_CACHE:
        _PAIR_CACHE[key] = _build_pair(pair_id, **params)
    return _PAIR_CACHE[key]


def _build_pair(pair_id: str, **params) -> SymmetricPair:
    if pair_id == "so(p+2,q)":
        return _orthogonal(1, int(params["p"]), int(params["q"]), pair_id)
    if pair_id == "so(p+1,q+1)":
        return _orthogonal(-1, int(params["p"]), int(params["q"]), pair_id)
    if pair_id == "so(3)/so(2)":
        return _orthogonal(1, 1, 0, pair_id)
    if pair_id == "so(2,1)/so(1,1)":
        return _orthogonal(-1, 1, 0, pair_id)
    if pair_id == "su(p+1,q)":
        return _su_model(int(params["p"]), int(params["q"]))
    if pair_id == "sl(n+1)":
        return _sl_model(int(params["n"]))
    if pair_id == "so*(2n+2)":
        return _sostar(int(params["n"]), params.get("realization", "complex"))
    raise ValueError(f"unknown symmetric pair {pair_id!r}")


def contact_reduce(pair: SymmetricPair) -> ContactReduction:
    """Split l = h + line with h the semisimple part and record [m, m] -> l/h."""
    alg = pair.alg
    derived = derived_span(alg, pair.h_span)
    if pair.semisimple_span is not None and pair.line is not None:
        h = span_rref(pair.semisimple_span)
        line = pair.line
        if rank(h + derived) != len(h):
            raise AlgebraError("declared semisimple part does not contain [l, l]")
    else:
        if len(derived) != len(pair.h_span) - 1:
            raise AlgebraError("l is not its derived algebra plus a line")
        h = derived
        line = next(v for v in pair.h_span if rank(h + [v]) > len(h))
    for v in h:
        if any(alg.bracket(v, line)):
            raise AlgebraError("line is not central in l")
    m_idx = pair.frame_indices(contact=False)
    e = alg.unit_vectors()
    li = line.index(1) if line.count(0) == len(line) - 1 else None
    if li is None:
        raise AlgebraError("line must be a basis vector")
    table = [[alg.bracket(e[i], e[j])[li] for j in m_idx] for i in m_idx]
    return ContactReduction(pair, h, line, [e[i] for i in m_idx], Mat(table))


def killing_signature_on_m(pair: SymmetricPair) -> Tuple[int, int]:
    kill = pair.alg.killing
    m = [i for i, v in enumerate(pair.alg.unit_vectors()) if v in pair.m_span]
    return signature_of_symmetric(kill.submatrix(m, m))


def is_effective(pair: SymmetricPair) -> bool:
    return not largest_ideal_in(pair.alg, pair.h_span)


def load_pair_table() -> dict:
    """The bundled table of simple symmetric pairs (schema documented in README)."""
    text = resources.files("cartanext").joinpath("data/symmetric_pairs.json").read_text()
    return json.loads(text)


def load_grading_table() -> dict:
    text = resources.files("cartanext").joinpath("data/gradings.json").read_text()
    return json.loads(text)
