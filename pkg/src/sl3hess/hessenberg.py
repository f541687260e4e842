"""Hessenberg types, the families H(m, n) of a type, NRS-ray parametrisation
and the construction of the perfect Hessenberg matrix ``(M|w)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .errors import (
    DegenerateType,
    NotHessenberg,
    NotPrimitive,
    NoUnimodularCompletion,
    ReduciblePolynomial,
)
from .exact import (
    Mat3,
    Vec3,
    charpoly_coeffs,
    has_unit_root,
    content,
    cross,
    det3,
    dot,
    md_characteristic,
    solve_dot_one,
    unimodular_inverse,
    xgcd,
)


@dataclass(frozen=True, order=True)
class HessenbergType:
    """The first two columns ``<a11,a21|a12,a22,a32>`` of a Hessenberg matrix."""

    a11: int
    a21: int
    a12: int
    a22: int
    a32: int

    @classmethod
    def parse(cls, text: str) -> "HessenbergType":
        """Parse ``"a11,a21|a12,a22,a32"``."""
        try:
            left, right = text.replace(" ", "").strip("<>").split("|")
            a11, a21 = (int(a) for a in left.split(","))
            a12, a22, a32 = (int(a) for a in right.split(","))
        except ValueError as exc:
            raise ValueError(f"malformed type text {text!r}") from exc
        return cls(a11, a21, a12, a22, a32)

    def text(self) -> str:
        return f"{self.a11},{self.a21}|{self.a12},{self.a22},{self.a32}"

    def __str__(self):
        return f"<{self.text()}>"

    @property
    def is_perfect(self) -> bool:
        return 0 <= self.a11 < self.a21 and 0 <= self.a12 < self.a32 and 0 <= self.a22 < self.a32

    @property
    def col1(self) -> Vec3:
        return (self.a11, self.a21, 0)

    @property
    def col2(self) -> Vec3:
        return (self.a12, self.a22, self.a32)

    def cofactors(self) -> Vec3:
        """Vector c with det(col1, col2, v) == c . v."""
        return cross(self.col1, self.col2)


OMEGA0 = HessenbergType(0, 1, 0, 0, 1)
V0: Vec3 = (1, 0, 0)


def complexity(t: HessenbergType) -> int:
    """Hessenberg complexity a21^2 * a32."""
    if t.a21 * t.a32 == 0:
        raise DegenerateType(f"{t} has a21*a32 = 0")
    return t.a21 ** 2 * t.a32


def type_of(m: Mat3) -> tuple[HessenbergType, bool]:
    if not m.is_hessenberg():
        raise NotHessenberg(f"entry (3,1) of {m.text()} is {m[2, 0]}")
    t = HessenbergType(m[0, 0], m[1, 0], m[0, 1], m[1, 1], m[2, 1])
    return t, t.is_perfect


def complete_type(t: HessenbergType) -> Vec3:
    """Canonical third column ``v`` making the matrix unimodular.

    Every completion differs from another by an integer combination of the
    first two columns, so the representative with 0 <= a23 < |a21| and
    0 <= a33 < |a32| is unique.
    """
    if t.a21 == 0 or t.a32 == 0:
        raise DegenerateType(f"{t} has a21*a32 = 0")
    c = t.cofactors()
    try:
        v = solve_dot_one(c)
    except ValueError:
        raise NoUnimodularCompletion(f"cofactors {c} of {t} are not coprime") from None
    # shift by n * col2 to bring a33 into range, then by m * col1 for a23
    k = v[2] // t.a32
    v = tuple(a - k * b for a, b in zip(v, t.col2))
    k = v[1] // t.a21
    v = tuple(a - k * b for a, b in zip(v, t.col1))
    assert dot(c, v) == 1
    return v


def is_valid_completion(t: HessenbergType, v) -> bool:
    return dot(t.cofactors(), v) == 1


@dataclass(frozen=True)
class FamilyPoint:
    type: HessenbergType
    v: Vec3
    m: int
    n: int


def family_matrix(t: HessenbergType, v, m: int, n: int) -> Mat3:
    """H_t^v(m, n): first two columns from ``t``, third column v + m*col1 + n*col2."""
    third = tuple(a + m * b + n * c for a, b, c in zip(v, t.col1, t.col2))
    return Mat3.from_columns(t.col1, t.col2, third)


def family_matrix_at(pt: FamilyPoint) -> Mat3:
    return family_matrix(pt.type, pt.v, pt.m, pt.n)


@dataclass(frozen=True)
class RaySpec:
    """Integer ray in the (m, n) plane of a family; index 1 goes in direction
    (-1, 0), index 2 in direction (a11, a21)."""

    type: HessenbergType
    v: Vec3
    base: tuple
    index: int

    def __post_init__(self):
        if self.index not in (1, 2):
            raise ValueError("ray index must be 1 or 2")

    @property
    def direction(self) -> tuple:
        if self.index == 1:
            return (-1, 0)
        return (self.type.a11, self.type.a21)

    def point(self, t: int) -> tuple:
        dm, dn = self.direction
        return (self.base[0] + dm * t, self.base[1] + dn * t)


def ray_matrix(r: RaySpec, t: int) -> Mat3:
    if t < 0:
        raise ValueError("ray parameter must be non-negative")
    m, n = r.point(t)
    return family_matrix(r.type, r.v, m, n)


# -- (M|w) ---------------------------------------------------------------


def complete_to_unimodular(w) -> Mat3:
    """A determinant-one integer matrix whose first column is the primitive ``w``."""
    a, b, c = w
    # column operations V with (a, b, c) V = (1, 0, 0); then (V^-1)^T has first column w
    g, s, t = xgcd(a, b)
    if g == 0:
        if c not in (1, -1):
            raise NotPrimitive(f"{tuple(w)} is not primitive")
        return Mat3.from_columns((0, 0, c), (1, 0, 0), (0, c, 0))
    V1 = Mat3(((s, -b // g, 0), (t, a // g, 0), (0, 0, 1)))
    h, x, y = xgcd(g, c)
    if h != 1:
        raise NotPrimitive(f"{tuple(w)} is not primitive")
    V = V1 @ Mat3(((x, 0, -c), (0, 1, 0), (y, 0, g)))
    U = unimodular_inverse(V).transpose()
    if U.det() < 0:
        U = Mat3.from_columns(U.column(0), U.column(1), tuple(-a for a in U.column(2)))
    assert U.column(0) == tuple(w) and U.det() == 1
    return U


def _complete_vector(w, rng: Optional[random.Random]) -> tuple[Vec3, Vec3]:
    """Two vectors u2, u3 with det(w, u2, u3) = 1 for primitive w."""
    U = complete_to_unimodular(w)
    u2, u3 = U.column(1), U.column(2)
    if rng is not None:
        k1, k2, k3 = rng.randint(-5, 5), rng.randint(-5, 5), rng.randint(-3, 3)
        u2 = tuple(x + k1 * y for x, y in zip(u2, w))
        u3 = tuple(x + k2 * y + k3 * z for x, y, z in zip(u3, w, u2))
    return u2, u3


def reduce_to_perfect(
    m: Mat3,
    w,
    *,
    completion_rng: Optional[random.Random] = None,
    return_basis: bool = False,
):
    """The perfect Hessenberg matrix ``(M|w)``.

    The operator is expressed in a unimodular basis ``e1 = w, e2, e3`` chosen
    so that the result is Hessenberg and perfect; with ``return_basis`` the
    pair ``(result, B)`` is returned, where ``B`` has columns e1, e2, e3 and
    ``B^-1 M B == result``.  ``completion_rng`` perturbs the intermediate
    lattice completions (the result must not depend on them).
    """
    w = tuple(int(a) for a in w)
    if content(w) != 1:
        raise NotPrimitive(f"{w} is not primitive")
    if has_unit_root(*charpoly_coeffs(m)):
        raise ReduciblePolynomial(f"{m.text()} has a root at +-1")

    e1 = w
    mw = m @ e1
    # step 2: basis {e1, g2} of the plane lattice span(w, Mw) ∩ Z^3
    u2, u3 = _complete_vector(e1, completion_rng)
    U = Mat3.from_columns(e1, u2, u3)
    Ui = unimodular_inverse(U)
    c1, c2, c3 = Ui @ mw
    if c2 == 0 and c3 == 0:
        raise ReduciblePolynomial(f"{w} is an eigenvector of {m.text()}")
    # the plane lattice in U-coordinates is {(s, k*p, k*q)}, p, q coprime
    _, p, q = _normalize_pair(c2, c3)
    g2 = tuple(p * a + q * b for a, b in zip(u2, u3))
    if completion_rng is not None:
        k = completion_rng.randint(-5, 5)
        g2 = tuple(a + k * b for a, b in zip(g2, e1))
        if completion_rng.random() < 0.5:
            g2 = tuple(-a for a in g2)
    q11, a21 = _decompose2(mw, e1, g2)
    b11, a11 = divmod(q11, abs(a21))
    s = 1 if a21 > 0 else -1
    e2 = tuple(s * a + b11 * b for a, b in zip(g2, e1))

    # step 3: g3 completing {e1, e2} to a basis of Z^3
    normal = cross(e1, e2)
    g3 = solve_dot_one(normal)
    if completion_rng is not None:
        k1, k2 = completion_rng.randint(-5, 5), completion_rng.randint(-5, 5)
        g3 = tuple(a + k1 * b + k2 * c for a, b, c in zip(g3, e1, e2))
        if completion_rng.random() < 0.5:
            g3 = tuple(-a for a in g3)
    C = Mat3.from_columns(e1, e2, g3)
    Ci = unimodular_inverse(C)
    q12, q22, a32 = Ci @ (m @ e2)
    if a32 == 0:
        raise ReduciblePolynomial(f"plane of {w} is invariant under {m.text()}")
    b12, a12 = divmod(q12, abs(a32))
    b22, a22 = divmod(q22, abs(a32))
    s = 1 if a32 > 0 else -1
    e3 = tuple(b12 * a + b22 * b + s * c for a, b, c in zip(e1, e2, g3))

    B = Mat3.from_columns(e1, e2, e3)
    result = unimodular_inverse(B) @ m @ B
    t, perfect = type_of(result)
    if not perfect or (t.a11, t.a21, t.a12, t.a22, t.a32) != (a11, abs(a21), a12, a22, abs(a32)):
        raise AssertionError(f"(M|w) construction produced {result.text()}")
    if return_basis:
        return result, B
    return result


def _normalize_pair(c2: int, c3: int) -> tuple[int, int, int]:
    g, _, _ = xgcd(c2, c3)
    return g, c2 // g, c3 // g


def _decompose2(x, e1, g2) -> tuple[int, int]:
    """Integer (a, b) with x == a*e1 + b*g2, for x in the lattice they span."""
    n = cross(e1, g2)
    # b from cross(e1, x) = b * cross(e1, g2)
    cx = cross(e1, x)
    i = max(range(3), key=lambda k: abs(n[k]))
    b, r = divmod(cx[i], n[i])
    assert r == 0
    y = tuple(xi - b * gi for xi, gi in zip(x, g2))
    j = max(range(3), key=lambda k: abs(e1[k]))
    a, r = divmod(y[j], e1[j])
    assert r == 0 and tuple(a * ei for ei in e1) == y
    return a, b


def hessenberg_complexity_of(m: Mat3) -> int:
    t, _ = type_of(m)
    return complexity(t)

