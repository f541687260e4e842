"""Spectrum classification of family members and the exact polynomial
identities behind the parabolic shape of the NRS region.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import DegenerateType, NoFactorization
from .exact import (
    BiPoly,
    Mat3,
    charpoly_coeffs,
    discriminant_from_coeffs,
    has_unit_root,
)
from .hessenberg import OMEGA0, V0, HessenbergType, complexity, family_matrix


class SpectrumClass(str, enum.Enum):
    REDUCIBLE = "ReduciblePoly"
    RS = "RS"
    NRS = "NRS"
    DEGENERATE = "DegenerateDiscriminant"


def classify_coeffs(b1: int, b2: int, b3: int) -> SpectrumClass:
    if has_unit_root(b1, b2, b3):
        return SpectrumClass.REDUCIBLE
    d = discriminant_from_coeffs(b1, b2, b3)
    if d < 0:
        return SpectrumClass.NRS
    if d > 0:
        return SpectrumClass.RS
    return SpectrumClass.DEGENERATE


def spectrum_class(m: Mat3) -> SpectrumClass:
    return classify_coeffs(*charpoly_coeffs(m))


# -- symbolic discriminant -------------------------------------------------


def symbolic_family(t: HessenbergType, v) -> tuple:
    """Rows of H_t^v(m, n) with BiPoly entries."""
    m, n = BiPoly.m(), BiPoly.n()
    third = [v[i] + t.col1[i] * m + t.col2[i] * n for i in range(3)]
    c1, c2 = t.col1, t.col2
    return tuple((BiPoly.const(c1[i]), BiPoly.const(c2[i]), third[i]) for i in range(3))


@lru_cache(maxsize=256)
def _delta_polynomial(t: HessenbergType, v: tuple) -> BiPoly:
    b = charpoly_coeffs(symbolic_family(t, v))
    return discriminant_from_coeffs(*b)


def delta_polynomial(t: HessenbergType, v) -> BiPoly:
    """The discriminant of H_t^v(m, n) as a polynomial in (m, n)."""
    return _delta_polynomial(t, tuple(v))


def omega0_delta_closed_form() -> BiPoly:
    """(m^2 - 4n)(n^2 + 4m) - 2mn - 27."""
    m, n = BiPoly.m(), BiPoly.n()
    return (m * m - 4 * n) * (n * n + 4 * m) - 2 * m * n - 27


def tube_identity_residuals() -> tuple[BiPoly, BiPoly]:
    """Both differences are the zero polynomial exactly when the two
    sum-of-squares bounds for the type <0,1|0,0,1> discriminant hold."""
    m, n = BiPoly.m(), BiPoly.n()
    d = delta_polynomial(OMEGA0, V0)
    lower = d - (m * m - 4 * n + 3) * (n * n + 4 * m + 3)
    lower_rhs = -2 * (n - 3) ** 2 - 2 * (m + 3) ** 2 - (n + m) ** 2
    upper = d - (m * m - 4 * n - 3) * (n * n + 4 * m - 3) + 72
    upper_rhs = 2 * (n - 3) ** 2 + 2 * (m + 3) ** 2 + (n - m) ** 2
    return lower - lower_rhs, upper - upper_rhs


# -- parabolas -------------------------------------------------------------


@dataclass(frozen=True)
class ParabolaPair:
    """Coefficients of the two quadratics whose product approximates the
    discriminant of a family far from the origin."""

    type: HessenbergType
    alpha1: Fraction
    beta1: Fraction
    gamma1: Fraction
    alpha2: Fraction
    beta2: Fraction
    gamma2: Fraction
    b: tuple

    def p1(self, m, n):
        m, n = _exact(m), _exact(n)
        return m - self.alpha1 * n * n - self.beta1 * n - self.gamma1

    def p2(self, m, n):
        m, n = _exact(m), _exact(n)
        a11, a21 = self.type.a11, self.type.a21
        s = (a21 * m - a11 * n) / a21
        return n / a21 - self.alpha2 * s * s - self.beta2 * s - self.gamma2

    def p1_poly(self) -> BiPoly:
        return self.p1(BiPoly.m(), BiPoly.n())

    def p2_poly(self) -> BiPoly:
        return self.p2(BiPoly.m(), BiPoly.n())


def _exact(x):
    return x if isinstance(x, (BiPoly, Fraction)) else Fraction(x)


@lru_cache(maxsize=256)
def _parabolas(t: HessenbergType, v: tuple) -> ParabolaPair:
    if t.a21 == 0 or t.a32 == 0:
        raise DegenerateType(f"{t} has a21*a32 = 0")
    h = family_matrix(t, v, 0, 0)
    b1, b2, b3 = charpoly_coeffs(h)
    a11, a21, a22, a32, a33 = t.a11, t.a21, t.a22, t.a32, h[2, 2]
    F = Fraction
    return ParabolaPair(
        type=t,
        alpha1=F(-a32, 4 * a21),
        beta1=F(a11 - a22 - a33, 2 * a21),
        gamma1=F(4 * b2 - b1 * b1, 4 * a21 * a32),
        alpha2=F(a32 * a21, 4 * b3),
        beta2=F(-b2, 2 * b3),
        gamma2=F(b2 * b2 - 4 * b1 * b3, 4 * a21 * a32 * b3),
        b=(b1, b2, b3),
    )


def parabola_coefficients(t: HessenbergType, v) -> ParabolaPair:
    return _parabolas(t, tuple(v))


class AsymptoticRegion(str, enum.Enum):
    INSIDE_SHRUNK = "InsideShrunk"
    BOUNDARY = "Boundary"
    OUTSIDE_GROWN = "OutsideGrown"


def _in_lambda(p1, p2, t) -> bool:
    # sign-corrected region: both quadratics on the same side of +-t
    return (p1 <= -t and p2 <= -t) or (p1 >= t and p2 >= t)


def asymptotic_nrs_test(t: HessenbergType, v, m: int, n: int, eps) -> AsymptoticRegion:
    eps = Fraction(eps)
    if eps < 0:
        raise ValueError("eps must be non-negative")
    pp = parabola_coefficients(t, v)
    p1, p2 = pp.p1(Fraction(m), Fraction(n)), pp.p2(Fraction(m), Fraction(n))
    if _in_lambda(p1, p2, eps):
        return AsymptoticRegion.INSIDE_SHRUNK
    if not _in_lambda(p1, p2, -eps):
        return AsymptoticRegion.OUTSIDE_GROWN
    return AsymptoticRegion.BOUNDARY


def parabola_identity_check(t: HessenbergType, v) -> tuple[int, BiPoly]:
    """Sign s and the residual delta - s*16*a21^2*a32^2*b3*p1*p2, whose
    total degree is at most 2 for the right sign."""
    pp = parabola_coefficients(t, v)
    d = delta_polynomial(t, v)
    prod = pp.p1_poly() * pp.p2_poly() * (16 * t.a21 ** 2 * t.a32 ** 2 * pp.b[2])
    for s in (-1, 1):
        residual = d - prod * s
        if residual.degree() <= 2:
            return s, residual
    raise NoFactorization(f"no sign makes the parabola product match the quartic part for {t}")


# -- rational normal form --------------------------------------------------


@dataclass(frozen=True)
class Normalization:
    """Rational conjugation of a family onto the <0,1|0,0,1> family.

    ``X`` has columns w, Hw, H^2 w for w = (1,0,0) and does not depend on
    (m, n); ``X^-1 H(m,n) X`` is the companion matrix H_0(m', n') with
    (m', n') = linear @ (m, n) + offset.
    """

    type: HessenbergType
    v: tuple
    X: Mat3
    linear: tuple
    offset: tuple

    def image(self, m, n) -> tuple:
        (a, b), (c, d) = self.linear
        return (a * m + b * n + self.offset[0], c * m + d * n + self.offset[1])

    def conjugated(self, m: int, n: int) -> list:
        """X^-1 H(m, n) X with Fraction entries."""
        x = _frac_matrix(self.X.rows)
        h = _frac_matrix(family_matrix(self.type, self.v, m, n).rows)
        return _mat_mul(_mat_mul(_frac_inverse(x), h), x)

    def check(self, m: int, n: int) -> bool:
        mm, nn = self.image(m, n)
        target = family_matrix(OMEGA0, V0, mm, nn).rows
        return self.conjugated(m, n) == [[Fraction(a) for a in row] for row in target]


def normalization(t: HessenbergType, v) -> Normalization:
    complexity(t)  # DegenerateType on a21*a32 == 0
    h = family_matrix(t, v, 0, 0)
    a = h.rows
    a11, a12, a13 = a[0]
    a21, a22, a23 = a[1]
    _, a32, a33 = a[2]
    X = Mat3(
        (
            (1, a11, a11 * a11 + a12 * a21),
            (0, a21, a11 * a21 + a21 * a22),
            (0, 0, a21 * a32),
        )
    )
    linear = ((a21 * a32, -a11 * a32), (0, a32))
    offset = (
        a23 * a32 - a11 * a33 + a12 * a21 - a22 * a33 - a11 * a22,
        a11 + a22 + a33,
    )
    return Normalization(t, tuple(v), X, linear, offset)


def _frac_matrix(rows) -> list:
    return [[Fraction(a) for a in row] for row in rows]


def _mat_mul(p, q) -> list:
    return [[sum(p[i][k] * q[k][j] for k in range(3)) for j in range(3)] for i in range(3)]


def _frac_inverse(x) -> list:
    a = x
    cof = [
        [
            a[(j + 1) % 3][(i + 1) % 3] * a[(j + 2) % 3][(i + 2) % 3]
            - a[(j + 1) % 3][(i + 2) % 3] * a[(j + 2) % 3][(i + 1) % 3]
            for j in range(3)
        ]
        for i in range(3)
    ]
    det = sum(a[0][k] * cof[k][0] for k in range(3))
    if det == 0:
        raise ZeroDivisionError("singular matrix")
    return [[c / det for c in row] for row in cof]


# -- behaviour along the first parabola --------------------------------------


def ray_polynomial(t: HessenbergType, v, eps) -> list:
    """Coefficients (constant first) of delta(-p1(0, s) + eps, s) in s."""
    pp = parabola_coefficients(t, v)
    s = BiPoly.m()  # reuse the first variable as the curve parameter
    m_of_s = pp.alpha1 * s * s + pp.beta1 * s + pp.gamma1 + Fraction(eps)
    d = delta_polynomial(t, v)
    return d(m_of_s, s).univariate()


def expected_ray_leading(t: HessenbergType, eps) -> Fraction:
    return Fraction(1, 4) * t.a21 * t.a32 ** 5 * Fraction(eps)


def ray_leading_coefficient_check(t: HessenbergType, v, eps) -> bool:
    coeffs = _trim(ray_polynomial(t, v, eps))
    return len(coeffs) - 1 == 4 and coeffs[4] == expected_ray_leading(t, eps)


def _trim(coeffs: list) -> list:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return c


def poly_degree(coeffs: list) -> int:
    return len(_trim(coeffs)) - 1
