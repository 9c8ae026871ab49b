"""Exact rational matrices, polynomial expressions and linear algebra over Q.

Everything here works with :class:`fractions.Fraction`; floats are rejected.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

__all__ = [
    "Rational",
    "to_rational",
    "parse_rational",
    "Mat",
    "mat_commutator",
    "realify",
    "quaternion_left_matrix",
    "PolyExpr",
    "PolyMat",
    "poly_eval",
    "rref",
    "nullspace",
    "rank",
    "solve_linear",
    "row_space_basis",
    "signature_of_symmetric",
    "MissingParameterError",
]

Rational = Fraction
Number = Union[int, Fraction]


def to_rational(value) -> Fraction:
    """Coerce ints, Fractions and 'p/q' strings; floats are refused."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def parse_rational(text: str) -> Fraction:
    """Parse ``a`` or ``a/b`` with integer a, b; decimal points are rejected."""
    text = text.strip()
    if not text or any(ch in text for ch in ".eEjJ"):
        raise ValueError(f"not an exact rational literal: {text!r}")
    parts = text.split("/")
    if len(parts) > 2:
        raise ValueError(f"not an exact rational literal: {text!r}")
    try:
        num = int(parts[0])
        den = int(parts[1]) if len(parts) == 2 else 1
    except ValueError:
        raise ValueError(f"not an exact rational literal: {text!r}") from None
    if den == 0:
        raise ZeroDivisionError(f"zero denominator in {text!r}")
    return Fraction(num, den)


# ---------------------------------------------------------------------------
# Rational matrices


class Mat:
    """Immutable dense rational matrix with zero-skipping products."""

    __slots__ = ("rows", "cols", "_data", "_hash")

    def __init__(self, data: Sequence[Sequence[Number]]):
        rows = len(data)
        cols = len(data[0]) if rows else 0
        out = []
        for row in data:
            if len(row) != cols:
                raise ValueError("ragged matrix")
            out.append(tuple(to_rational(x) for x in row))
        self.rows = rows
        self.cols = cols
        self._data = tuple(out)
        self._hash = None

    @classmethod
    def _raw(cls, data: Tuple[Tuple[Fraction, ...], ...], rows: int, cols: int) -> "Mat":
        m = cls.__new__(cls)
        m.rows = rows
        m.cols = cols
        m._data = data
        m._hash = None
        return m

    @classmethod
    def zeros(cls, rows: int, cols: Optional[int] = None) -> "Mat":
        cols = rows if cols is None else cols
        z = Fraction(0)
        return cls._raw(tuple((z,) * cols for _ in range(rows)), rows, cols)

    @classmethod
    def identity(cls, n: int) -> "Mat":
        return cls.diag([1] * n)

    @classmethod
    def diag(cls, values: Sequence[Number]) -> "Mat":
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def unit(cls, n: int, i: int, j: int, value: Number = 1) -> "Mat":
        return cls([[value if (r, c) == (i, j) else 0 for c in range(n)] for r in range(n)])

    @classmethod
    def block_diag(cls, blocks: Sequence["Mat"]) -> "Mat":
        n = sum(b.rows for b in blocks)
        m = sum(b.cols for b in blocks)
        out = [[Fraction(0)] * m for _ in range(n)]
        r0 = c0 = 0
        for b in blocks:
            for i in range(b.rows):
                for j in range(b.cols):
                    out[r0 + i][c0 + j] = b[i, j]
            r0 += b.rows
            c0 += b.cols
        return cls(out)

    def __getitem__(self, idx: Tuple[int, int]) -> Fraction:
        i, j = idx
        return self._data[i][j]

    def row(self, i: int) -> Tuple[Fraction, ...]:
        return self._data[i]

    def tolist(self) -> List[List[Fraction]]:
        return [list(r) for r in self._data]

    def flat(self) -> Tuple[Fraction, ...]:
        return tuple(x for r in self._data for x in r)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def __eq__(self, other) -> bool:
        return isinstance(other, Mat) and self.shape == other.shape and self._data == other._data

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self._data))
        return self._hash

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in r) for r in self._data)
        return f"Mat([{body}])"

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._data for x in r)

    def __add__(self, other: "Mat") -> "Mat":
        self._check_same(other)
        return Mat._raw(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self._data, other._data)),
            self.rows,
            self.cols,
        )

    def __sub__(self, other: "Mat") -> "Mat":
        self._check_same(other)
        return Mat._raw(
            tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self._data, other._data)),
            self.rows,
            self.cols,
        )

    def __neg__(self) -> "Mat":
        return Mat._raw(tuple(tuple(-a for a in r) for r in self._data), self.rows, self.cols)

    def scale(self, s: Number) -> "Mat":
        s = to_rational(s)
        return Mat._raw(tuple(tuple(a * s for a in r) for r in self._data), self.rows, self.cols)

    def __mul__(self, other):
        if isinstance(other, Mat):
            return self.matmul(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __matmul__(self, other: "Mat") -> "Mat":
        return self.matmul(other)

    def matmul(self, other: "Mat") -> "Mat":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        zero = Fraction(0)
        other_rows = [[(j, x) for j, x in enumerate(r) if x] for r in other._data]
        out = []
        for r in self._data:
            acc = [zero] * other.cols
            for k, a in enumerate(r):
                if a:
                    for j, b in other_rows[k]:
                        acc[j] += a * b
            out.append(tuple(acc))
        return Mat._raw(tuple(out), self.rows, other.cols)

    def apply(self, vec: Sequence[Number]) -> List[Fraction]:
        return [sum((a * b for a, b in zip(r, vec) if a), Fraction(0)) for r in self._data]

    def T(self) -> "Mat":
        return Mat._raw(tuple(zip(*self._data)) if self.rows else (), self.cols, self.rows)

    def trace(self) -> Fraction:
        return sum((self._data[i][i] for i in range(min(self.rows, self.cols))), Fraction(0))

    def _check_same(self, other: "Mat") -> None:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def inverse(self) -> "Mat":
        if self.rows != self.cols:
            raise ValueError("only square matrices are invertible")
        n = self.rows
        aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(self._data)]
        red, piv = rref(aug)
        if piv[:n] != list(range(n)):
            raise ZeroDivisionError("matrix is singular")
        return Mat([r[n:] for r in red[:n]])

    def det(self) -> Fraction:
        n = self.rows
        a = [list(r) for r in self._data]
        det = Fraction(1)
        for c in range(n):
            p = next((r for r in range(c, n) if a[r][c] != 0), None)
            if p is None:
                return Fraction(0)
            if p != c:
                a[c], a[p] = a[p], a[c]
                det = -det
            det *= a[c][c]
            inv = 1 / a[c][c]
            for r in range(c + 1, n):
                f = a[r][c] * inv
                if f:
                    a[r] = [x - f * y for x, y in zip(a[r], a[c])]
        return det

    def rank(self) -> int:
        return rank(self.tolist())

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Mat":
        return Mat([[self._data[i][j] for j in cols] for i in rows])

    def power(self, k: int) -> "Mat":
        out = Mat.identity(self.rows)
        for _ in range(k):
            out = out @ self
        return out


def mat_commutator(a: Mat, b: Mat) -> Mat:
    """Matrix commutator ``ab - ba``."""
    return a @ b - b @ a


# ---------------------------------------------------------------------------
# Realification of complex, para-complex and quaternionic matrices


def quaternion_left_matrix(q: Sequence[Number]) -> Mat:
    """4x4 real matrix of left multiplication by q = q0 + q1 i + q2 j + q3 k."""
    a, b, c, d = (to_rational(x) for x in q)
    return Mat([[a, -b, -c, -d], [b, a, -d, c], [c, d, a, -b], [d, -c, b, a]])


def _entry_block(tag: str, comp: Sequence[Number]) -> List[List[Fraction]]:
    if tag == "R":
        return [[to_rational(comp[0])]]
    if tag == "C":
        a, b = (to_rational(x) for x in comp)
        return [[a, -b], [b, a]]
    if tag == "paraC":
        a, b = (to_rational(x) for x in comp)
        return [[a, b], [b, a]]
    if tag == "H":
        return quaternion_left_matrix(comp).tolist()
    raise ValueError(f"unknown scalar field tag {tag!r}")


_FIELD_WIDTH = {"R": 1, "C": 2, "paraC": 2, "H": 4}


def field_width(tag: str) -> int:
    try:
        return _FIELD_WIDTH[tag]
    except KeyError:
        raise ValueError(f"unknown scalar field tag {tag!r}") from None


def realify(tag: str, components: Sequence[Sequence[Sequence[Number]]]) -> Mat:
    """Real form of a matrix over R, C, para-C or H.

    ``components[i][j]`` lists the real coordinates of entry (i, j):
    one for R, (re, im) for C and para-C, (1, i, j, k) for H.
    """
    w = field_width(tag)
    n = len(components)
    m = len(components[0]) if n else 0
    out = [[Fraction(0)] * (w * m) for _ in range(w * n)]
    for i, row in enumerate(components):
        if len(row) != m:
            raise ValueError("ragged matrix")
        for j, comp in enumerate(row):
            if len(comp) != w:
                raise ValueError(f"entry ({i},{j}) needs {w} components for {tag}")
            blk = _entry_block(tag, comp)
            for a in range(w):
                for b in range(w):
                    out[w * i + a][w * j + b] = blk[a][b]
    return Mat(out)


# ---------------------------------------------------------------------------
# Linear algebra on lists of rationals


def rref(rows: Sequence[Sequence[Number]]) -> Tuple[List[List[Fraction]], List[int]]:
    """Reduced row echelon form and pivot columns (zero rows dropped)."""
    a = [[to_rational(x) for x in r] for r in rows]
    if not a:
        return [], []
    ncols = len(a[0])
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        if r == len(a):
            break
        p = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        if inv != 1:
            a[r] = [x * inv for x in a[r]]
        pr = a[r]
        nz = [j for j in range(c, ncols) if pr[j] != 0]
        for i in range(len(a)):
            if i != r:
                f = a[i][c]
                if f:
                    ri = a[i]
                    for j in nz:
                        ri[j] -= f * pr[j]
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank(rows: Sequence[Sequence[Number]]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence[Number]], ncols: Optional[int] = None) -> List[List[Fraction]]:
    """Basis of {x : A x = 0}, one vector per free column."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    red, piv = rref(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in set(piv)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, p in zip(red, piv):
            v[p] = -r[f]
        basis.append(v)
    return basis


def row_space_basis(rows: Sequence[Sequence[Number]]) -> List[List[Fraction]]:
    return rref(rows)[0]


def solve_linear(a: Sequence[Sequence[Number]], b: Sequence[Number]) -> Optional[List[Fraction]]:
    """One solution of A x = b (free variables set to zero), or None."""
    if not a:
        return None if any(to_rational(x) != 0 for x in b) else []
    n = len(a[0])
    aug = [list(r) + [bv] for r, bv in zip(a, b)]
    red, piv = rref(aug)
    if piv and piv[-1] == n:
        return None
    x = [Fraction(0)] * n
    for r, p in zip(red, piv):
        x[p] = r[n]
    return x


def signature_of_symmetric(m: Mat) -> Tuple[int, int]:
    """(positive, negative) inertia of a symmetric rational matrix."""
    n = m.rows
    a = m.tolist()
    pos = neg = 0
    active = list(range(n))
    while active:
        piv = next((i for i in active if a[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in active for j in active if i < j and a[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # replace e_i by e_i + e_j to create a nonzero diagonal entry
            for k in range(n):
                a[i][k] += a[j][k]
            for k in range(n):
                a[k][i] += a[k][j]
            continue
        d = a[piv][piv]
        if d > 0:
            pos += 1
        else:
            neg += 1
        rest = [i for i in active if i != piv]
        for i in rest:
            f = a[i][piv] / d
            if f:
                for k in rest:
                    a[i][k] -= f * a[piv][k]
        for i in rest:
            a[i][piv] = a[piv][i] = Fraction(0)
        active = rest
    return pos, neg


# ---------------------------------------------------------------------------
# Polynomial expressions in named parameters

Monomial = Tuple[Tuple[str, int], ...]


class MissingParameterError(KeyError):
    def __init__(self, names: Iterable[str]):
        self.names = sorted(set(names))
        super().__init__(f"missing parameter values: {', '.join(self.names)}")

    def __str__(self) -> str:
        return self.args[0]


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for name, e in b:
        d[name] = d.get(name, 0) + e
    return tuple(sorted(d.items()))


class PolyExpr:
    """Polynomial with rational coefficients in named parameters."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Monomial, Number]] = None):
        clean: Dict[Monomial, Fraction] = {}
        if terms:
            for mono, c in terms.items():
                c = to_rational(c)
                if c:
                    clean[tuple(sorted(mono))] = clean.get(tuple(sorted(mono)), Fraction(0)) + c
            clean = {m: c for m, c in clean.items() if c}
        self.terms = clean

    @classmethod
    def _raw(cls, terms: Dict[Monomial, Fraction]) -> "PolyExpr":
        p = cls.__new__(cls)
        p.terms = terms
        return p

    @classmethod
    def const(cls, value: Number) -> "PolyExpr":
        value = to_rational(value)
        return cls._raw({(): value} if value else {})

    @classmethod
    def var(cls, name: str) -> "PolyExpr":
        return cls._raw({((name, 1),): Fraction(1)})

    @classmethod
    def lift(cls, value) -> "PolyExpr":
        if isinstance(value, PolyExpr):
            return value
        return cls.const(value)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(m == () for m in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.terms.get((), Fraction(0))

    def variables(self) -> set:
        return {name for m in self.terms for name, _ in m}

    def degree(self) -> int:
        return max((sum(e for _, e in m) for m in self.terms), default=0)

    def __add__(self, other) -> "PolyExpr":
        other = PolyExpr.lift(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return PolyExpr._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "PolyExpr":
        return PolyExpr._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "PolyExpr":
        return self + (-PolyExpr.lift(other))

    def __rsub__(self, other) -> "PolyExpr":
        return PolyExpr.lift(other) - self

    def __mul__(self, other) -> "PolyExpr":
        if not isinstance(other, PolyExpr):
            c = to_rational(other)
            if not c:
                return PolyExpr._raw({})
            return PolyExpr._raw({m: v * c for m, v in self.terms.items()})
        if not self.terms or not other.terms:
            return PolyExpr._raw({})
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return PolyExpr._raw(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "PolyExpr":
        c = to_rational(other)
        return self * (1 / c)

    def __pow__(self, k: int) -> "PolyExpr":
        out = PolyExpr.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, PolyExpr):
            return self.terms == other.terms
        try:
            return self.terms == PolyExpr.const(other).terms
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def sorted_terms(self) -> List[Tuple[Monomial, Fraction]]:
        return sorted(self.terms.items(), key=lambda t: (-sum(e for _, e in t[0]), t[0]))

    def __repr__(self) -> str:
        return f"PolyExpr({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, c in self.sorted_terms():
            name = "*".join(n if e == 1 else f"{n}^{e}" for n, e in mono)
            if not name:
                parts.append(str(c))
            elif c == 1:
                parts.append(name)
            elif c == -1:
                parts.append("-" + name)
            else:
                parts.append(f"{c}*{name}")
        return " + ".join(parts).replace("+ -", "- ")

    def eval(self, values: Mapping[str, Number]) -> Fraction:
        missing = self.variables() - set(values)
        if missing:
            raise MissingParameterError(missing)
        total = Fraction(0)
        for mono, c in self.terms.items():
            t = c
            for name, e in mono:
                t *= to_rational(values[name]) ** e
            total += t
        return total

    def subs(self, values: Mapping[str, object]) -> "PolyExpr":
        """Substitute numbers or polynomials for some of the parameters."""
        if not values or not (self.variables() & set(values)):
            return self
        out = PolyExpr._raw({})
        cache: Dict[Tuple[str, int], PolyExpr] = {}
        for mono, c in self.terms.items():
            t = PolyExpr.const(c)
            for name, e in mono:
                if name in values:
                    key = (name, e)
                    if key not in cache:
                        cache[key] = PolyExpr.lift(values[name]) ** e
                    t = t * cache[key]
                else:
                    t = t * PolyExpr._raw({((name, e),): Fraction(1)})
            out = out + t
        return out

    def linear_part(self, names: Sequence[str]) -> Optional[Tuple[Dict[str, Fraction], Fraction]]:
        """Coefficients and constant if the polynomial is affine in ``names`` only."""
        coeffs: Dict[str, Fraction] = {}
        const = Fraction(0)
        for mono, c in self.terms.items():
            if mono == ():
                const = c
            elif len(mono) == 1 and mono[0][1] == 1 and mono[0][0] in names:
                coeffs[mono[0][0]] = c
            else:
                return None
        return coeffs, const


def poly_eval(p: PolyExpr, values: Mapping[str, Number]) -> Fraction:
    """Evaluate p; raises :class:`MissingParameterError` naming absent parameters."""
    return PolyExpr.lift(p).eval(values)


class PolyMat:
    """Matrix with :class:`PolyExpr` entries."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, data: Sequence[Sequence[object]]):
        self.rows = len(data)
        self.cols = len(data[0]) if data else 0
        self._data = tuple(tuple(PolyExpr.lift(x) for x in r) for r in data)

    @classmethod
    def from_mat(cls, m: Mat) -> "PolyMat":
        return cls(m.tolist())

    @classmethod
    def zeros(cls, rows: int, cols: Optional[int] = None) -> "PolyMat":
        cols = rows if cols is None else cols
        return cls([[0] * cols for _ in range(rows)])

    def __getitem__(self, idx: Tuple[int, int]) -> PolyExpr:
        return self._data[idx[0]][idx[1]]

    def tolist(self) -> List[List[PolyExpr]]:
        return [list(r) for r in self._data]

    def flat(self) -> Tuple[PolyExpr, ...]:
        return tuple(x for r in self._data for x in r)

    def __add__(self, other: "PolyMat") -> "PolyMat":
        other = _as_polymat(other)
        return PolyMat([[a + b for a, b in zip(r, s)] for r, s in zip(self._data, other._data)])

    def __sub__(self, other: "PolyMat") -> "PolyMat":
        other = _as_polymat(other)
        return PolyMat([[a - b for a, b in zip(r, s)] for r, s in zip(self._data, other._data)])

    def __neg__(self) -> "PolyMat":
        return PolyMat([[-a for a in r] for r in self._data])

    def scale(self, s) -> "PolyMat":
        return PolyMat([[a * s for a in r] for r in self._data])

    def __matmul__(self, other) -> "PolyMat":
        other = _as_polymat(other)
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        other_rows = [[(j, x) for j, x in enumerate(r) if x.terms] for r in other._data]
        out = []
        for r in self._data:
            acc = [PolyExpr._raw({}) for _ in range(other.cols)]
            for k, a in enumerate(r):
                if a.terms:
                    for j, b in other_rows[k]:
                        acc[j] = acc[j] + a * b
            out.append(acc)
        return PolyMat(out)

    def T(self) -> "PolyMat":
        return PolyMat([list(c) for c in zip(*self._data)])

    def is_zero(self) -> bool:
        return all(x.is_zero() for r in self._data for x in r)

    def __eq__(self, other) -> bool:
        if isinstance(other, Mat):
            other = PolyMat.from_mat(other)
        return isinstance(other, PolyMat) and self._data == other._data

    def __hash__(self) -> int:
        return hash(self._data)

    def subs(self, values: Mapping[str, object]) -> "PolyMat":
        return PolyMat([[x.subs(values) for x in r] for r in self._data])

    def eval(self, values: Mapping[str, Number]) -> Mat:
        return Mat([[x.eval(values) for x in r] for r in self._data])

    def variables(self) -> set:
        out: set = set()
        for r in self._data:
            for x in r:
                out |= x.variables()
        return out

    def __repr__(self) -> str:
        return "PolyMat([" + "; ".join(", ".join(str(x) for x in r) for r in self._data) + "])"


def _as_polymat(m) -> PolyMat:
    if isinstance(m, PolyMat):
        return m
    if isinstance(m, Mat):
        return PolyMat.from_mat(m)
    return PolyMat(m)


def poly_commutator(a, b) -> PolyMat:
    a = _as_polymat(a)
    b = _as_polymat(b)
    return (a @ b) - (b @ a)


def iter_nonzero(vec: Sequence[Fraction]) -> Iterator[Tuple[int, Fraction]]:
    return ((i, x) for i, x in enumerate(vec) if x)
