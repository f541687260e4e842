"""Exact integer and rational algebra for 3x3 matrices, cubic forms and
bivariate polynomials.

Everything here uses Python integers and :class:`fractions.Fraction`, so
no value is ever rounded; the one numpy helper only screens before an
exact evaluation.  Matrices are immutable.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from .errors import NotUnimodular

Vec3 = tuple  # three Python ints


def vec(x, y, z) -> Vec3:
    return (int(x), int(y), int(z))


def content(w: Sequence[int]) -> int:
    return gcd(gcd(w[0], w[1]), w[2])


def is_primitive(w: Sequence[int]) -> bool:
    return content(w) == 1


def primitive_part(w: Sequence[int]) -> Vec3:
    g = content(w)
    if g == 0:
        raise ValueError("zero vector has no primitive part")
    return (w[0] // g, w[1] // g, w[2] // g)


def cross(u: Sequence[int], v: Sequence[int]) -> Vec3:
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def dot(u: Sequence, v: Sequence):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def det3(c0: Sequence, c1: Sequence, c2: Sequence):
    """Determinant of the matrix with columns ``c0, c1, c2``."""
    return dot(c0, cross(c1, c2))


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``s*a + t*b == g == gcd(a, b) >= 0``."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


def solve_dot_one(c: Sequence[int]) -> Vec3:
    """Some integer ``u`` with ``c . u == 1``; requires gcd(c) == 1."""
    g01, s0, s1 = xgcd(c[0], c[1])
    g, t, s2 = xgcd(g01, c[2])
    if g != 1:
        raise ValueError(f"gcd{tuple(c)} = {g} != 1")
    return (t * s0, t * s1, s2)


class Mat3:
    """An immutable 3x3 matrix with arbitrary precision integer entries."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable[int]]):
        r = tuple(tuple(int(a) for a in row) for row in rows)
        if len(r) != 3 or any(len(row) != 3 for row in r):
            raise ValueError("Mat3 needs three rows of three entries")
        object.__setattr__(self, "rows", r)

    def __setattr__(self, name, value):
        raise AttributeError("Mat3 is immutable")

    @classmethod
    def identity(cls) -> "Mat3":
        return cls(((1, 0, 0), (0, 1, 0), (0, 0, 1)))

    @classmethod
    def from_columns(cls, c0, c1, c2) -> "Mat3":
        return cls(zip(c0, c1, c2))

    @classmethod
    def parse(cls, text: str) -> "Mat3":
        """Parse ``"a,b,c;d,e,f;g,h,i"``."""
        rows = [r for r in text.replace(" ", "").split(";")]
        try:
            return cls([int(a) for a in r.split(",")] for r in rows)
        except ValueError as exc:
            raise ValueError(f"malformed matrix text {text!r}") from exc

    def text(self) -> str:
        return ";".join(",".join(str(a) for a in row) for row in self.rows)

    def __repr__(self):
        return f"Mat3({self.text()!r})"

    def __eq__(self, other):
        return isinstance(other, Mat3) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __lt__(self, other):
        return self.rows < other.rows

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> Vec3:
        return (self.rows[0][j], self.rows[1][j], self.rows[2][j])

    def transpose(self) -> "Mat3":
        return Mat3(zip(*self.rows))

    def __matmul__(self, other):
        if isinstance(other, Mat3):
            cols = [other.column(j) for j in range(3)]
            return Mat3([dot(row, c) for c in cols] for row in self.rows)
        return tuple(dot(row, other) for row in self.rows)

    def __mul__(self, k: int) -> "Mat3":
        return Mat3([k * a for a in row] for row in self.rows)

    __rmul__ = __mul__

    def __add__(self, other: "Mat3") -> "Mat3":
        return Mat3([a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows))

    def __sub__(self, other: "Mat3") -> "Mat3":
        return Mat3([a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows))

    def __neg__(self) -> "Mat3":
        return self * -1

    def __pow__(self, k: int) -> "Mat3":
        if k < 0:
            return unimodular_inverse(self) ** (-k)
        result, base = Mat3.identity(), self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def det(self) -> int:
        return det3(self.column(0), self.column(1), self.column(2))

    def trace(self) -> int:
        return self.rows[0][0] + self.rows[1][1] + self.rows[2][2]

    def adjugate(self) -> "Mat3":
        c0, c1, c2 = self.column(0), self.column(1), self.column(2)
        # rows of the adjugate are the cross products of column pairs
        return Mat3((cross(c1, c2), cross(c2, c0), cross(c0, c1)))

    def is_hessenberg(self) -> bool:
        return self.rows[2][0] == 0


def unimodular_inverse(m: Mat3) -> Mat3:
    d = m.det()
    if d not in (1, -1):
        raise NotUnimodular(f"det = {d}")
    return m.adjugate() * d


def charpoly_coeffs(rows) -> tuple:
    """``(b1, b2, b3)`` with char(t) = -t^3 + b1 t^2 - b2 t + b3.

    Works on a :class:`Mat3` or on any 3x3 nested sequence whose entries
    support ring arithmetic (used with :class:`BiPoly` entries).
    """
    a = rows.rows if isinstance(rows, Mat3) else rows
    b1 = a[0][0] + a[1][1] + a[2][2]
    b2 = (
        a[0][0] * a[1][1] - a[0][1] * a[1][0]
        + a[0][0] * a[2][2] - a[0][2] * a[2][0]
        + a[1][1] * a[2][2] - a[1][2] * a[2][1]
    )
    b3 = (
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    )
    return b1, b2, b3


def discriminant_from_coeffs(b1, b2, b3):
    """Discriminant of -t^3 + b1 t^2 - b2 t + b3.

    Positive for three distinct real roots, negative for one real root
    and a complex conjugate pair.
    """
    return (
        18 * b1 * b2 * b3
        - 4 * b1 ** 3 * b3
        + b1 ** 2 * b2 ** 2
        - 4 * b2 ** 3
        - 27 * b3 ** 2
    )


def has_unit_root(b1: int, b2: int, b3: int) -> bool:
    """Whether -t^3 + b1 t^2 - b2 t + b3 vanishes at t = 1 or t = -1.

    For b3 = +-1 these are the only possible rational roots.
    """
    return b1 - b2 + b3 - 1 == 0 or b1 + b2 + b3 + 1 == 0


def discriminant(m: Mat3) -> int:
    return discriminant_from_coeffs(*charpoly_coeffs(m))


# -- cubic forms ---------------------------------------------------------

CUBIC_MONOMIALS = tuple(
    (i, j, 3 - i - j) for i in range(3, -1, -1) for j in range(3 - i, -1, -1)
)


def _lin_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
            out[e] = out.get(e, 0) + c1 * c2
    return out


class CubicForm:
    """Homogeneous integer cubic in (x, y, z), coefficients in
    :data:`CUBIC_MONOMIALS` order (x^3, x^2y, x^2z, xy^2, ..., z^3)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[int]):
        if len(coeffs) != 10:
            raise ValueError("a ternary cubic has ten coefficients")
        object.__setattr__(self, "coeffs", tuple(int(c) for c in coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("CubicForm is immutable")

    def __eq__(self, other):
        return isinstance(other, CubicForm) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"CubicForm{self.coeffs}"

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __call__(self, w: Sequence[int]) -> int:
        x, y, z = w
        total = 0
        for c, (i, j, k) in zip(self.coeffs, CUBIC_MONOMIALS):
            if c:
                total += c * x ** i * y ** j * z ** k
        return total

    def min_abs_rows(self, ws):
        """(min |F|, boolean mask of the rows attaining it), exactly.

        Floating point with a rigorous error bound screens the rows; only
        those that could attain the minimum are evaluated exactly.
        """
        ws = np.asarray(ws)
        x, y, z = (ws[:, i].astype(float) for i in range(3))
        val = np.zeros(len(ws))
        mag = np.zeros(len(ws))
        for c, (i, j, k) in zip(self.coeffs, CUBIC_MONOMIALS):
            if c:
                term = float(c) * (x ** i * y ** j * z ** k)
                val += term
                mag += np.abs(term)
        err = 1e-12 * mag + 1.0
        val = np.abs(val)
        near = np.nonzero(val - err <= (val + err).min())[0]
        exact = np.abs(np.array([self(tuple(int(a) for a in ws[r])) for r in near], dtype=object))
        mu = int(exact.min())
        mask = np.zeros(len(ws), dtype=bool)
        mask[near[exact == mu]] = True
        return mu, mask

    def max_abs_bound(self, bound: int) -> int:
        """Upper bound on |F(w)| over the box |w|_inf <= bound."""
        return sum(abs(c) for c in self.coeffs) * bound ** 3


def cubic_form(m: Mat3) -> CubicForm:
    """The form F(w) = det(w, Mw, M^2 w)."""
    basis = ({(1, 0, 0): 1}, {(0, 1, 0): 1}, {(0, 0, 1): 1})

    def apply(mat: Mat3, lin):
        out = []
        for row in mat.rows:
            acc: dict = {}
            for a, l in zip(row, lin):
                if a:
                    for e, c in l.items():
                        acc[e] = acc.get(e, 0) + a * c
            out.append(acc)
        return out

    w = list(basis)
    mw = apply(m, w)
    m2w = apply(m, mw)
    cols = (w, mw, m2w)
    total: dict = {}
    for perm in permutations(range(3)):
        sign = _perm_sign(perm)
        term = _lin_mul(_lin_mul(cols[0][perm[0]], cols[1][perm[1]]), cols[2][perm[2]])
        for e, c in term.items():
            total[e] = total.get(e, 0) + sign * c
    return CubicForm([total.get(e, 0) for e in CUBIC_MONOMIALS])


def _perm_sign(perm) -> int:
    sign = 1
    p = list(perm)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def md_characteristic(m: Mat3, w: Sequence[int]) -> int:
    """Unoriented volume |det(w, Mw, M^2 w)|."""
    mw = m @ w
    return abs(det3(w, mw, m @ mw))


# -- bivariate polynomials -----------------------------------------------


def _coerce(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"cannot use {type(c).__name__} as a coefficient")


class BiPoly:
    """Polynomial in (m, n) with exact rational coefficients.

    ``terms`` maps exponent pairs ``(i, j)`` to the coefficient of
    ``m**i * n**j``; zero coefficients are never stored.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for e, c in (terms or {}).items():
            c = _coerce(c)
            if c:
                clean[(int(e[0]), int(e[1]))] = c
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("BiPoly is immutable")

    @classmethod
    def const(cls, c) -> "BiPoly":
        return cls({(0, 0): c})

    @classmethod
    def m(cls) -> "BiPoly":
        return cls({(1, 0): 1})

    @classmethod
    def n(cls) -> "BiPoly":
        return cls({(0, 1): 1})

    @staticmethod
    def _lift(other):
        if isinstance(other, BiPoly):
            return other
        return BiPoly.const(other)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return BiPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return BiPoly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        out: dict = {}
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                e = (i1 + i2, j1 + j2)
                out[e] = out.get(e, 0) + c1 * c2
        return BiPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, k):
        k = _coerce(k)
        return BiPoly({e: c / k for e, c in self.terms.items()})

    def __pow__(self, k: int):
        result = BiPoly.const(1)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = BiPoly.const(other)
        return isinstance(other, BiPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "BiPoly(0)"
        parts = []
        for (i, j), c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(
                s for s in (f"m^{i}" if i > 1 else "m" * i, f"n^{j}" if j > 1 else "n" * j) if s
            )
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return "BiPoly(" + " + ".join(parts) + ")"

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((i + j for i, j in self.terms), default=-1)

    def coefficient(self, i: int, j: int) -> Fraction:
        return self.terms.get((i, j), Fraction(0))

    def homogeneous_part(self, d: int) -> "BiPoly":
        return BiPoly({e: c for e, c in self.terms.items() if e[0] + e[1] == d})

    def __call__(self, m, n):
        """Evaluate at ring elements ``m`` and ``n`` (numbers or BiPolys)."""
        if not self.terms:
            return Fraction(0)
        max_i = max(i for i, _ in self.terms)
        max_j = max(j for _, j in self.terms)
        mp = [1]
        for _ in range(max_i):
            mp.append(mp[-1] * m)
        np_ = [1]
        for _ in range(max_j):
            np_.append(np_[-1] * n)
        total = 0
        for (i, j), c in self.terms.items():
            total = total + c * (mp[i] * np_[j])
        return total

    def univariate(self) -> list:
        """Coefficients (constant first) of a polynomial in m alone."""
        if any(j for _, j in self.terms):
            raise ValueError("polynomial depends on n")
        d = max(self.degree(), 0)
        return [self.coefficient(i, 0) for i in range(d + 1)]
