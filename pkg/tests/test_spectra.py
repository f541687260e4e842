import random
from fractions import Fraction

import numpy as np
import pytest

from sl3hess.exact import BiPoly, Mat3, discriminant
from sl3hess.hessenberg import OMEGA0, V0, HessenbergType, complete_type, family_matrix
from sl3hess.spectra import (
    AsymptoticRegion,
    SpectrumClass,
    asymptotic_nrs_test,
    delta_polynomial,
    expected_ray_leading,
    normalization,
    omega0_delta_closed_form,
    parabola_coefficients,
    parabola_identity_check,
    poly_degree,
    ray_leading_coefficient_check,
    ray_polynomial,
    spectrum_class,
    tube_identity_residuals,
)
from sl3hess.survey import CENSUS_TABLE

from conftest import random_matrix

TABLE_TYPES = [HessenbergType.parse(t) for t, _, _ in CENSUS_TABLE]
T113 = HessenbergType.parse("1,2|1,1,3")


def test_spectrum_examples():
    assert spectrum_class(family_matrix(OMEGA0, V0, 0, 0)) is SpectrumClass.REDUCIBLE
    assert discriminant(family_matrix(OMEGA0, V0, 0, 0)) == -27
    assert spectrum_class(family_matrix(OMEGA0, V0, 10, 0)) is SpectrumClass.RS
    assert discriminant(family_matrix(OMEGA0, V0, 10, 0)) == 3973
    assert spectrum_class(family_matrix(OMEGA0, V0, -3, 3)) is SpectrumClass.REDUCIBLE
    assert spectrum_class(Mat3.identity()) is SpectrumClass.REDUCIBLE


def test_spectrum_class_matches_numpy_eigenvalues(rng):
    seen = set()
    for _ in range(6000):
        m = random_matrix(rng, 3)
        if m.det() != 1:
            continue
        cls = spectrum_class(m)
        seen.add(cls)
        if cls is SpectrumClass.REDUCIBLE:
            continue
        ev = np.linalg.eigvals(np.array(m.rows, dtype=float))
        nonreal = np.sum(np.abs(ev.imag) > 1e-7)
        assert (nonreal == 2) == (cls is SpectrumClass.NRS)
    assert {SpectrumClass.NRS, SpectrumClass.RS} <= seen


def test_omega0_delta_closed_form():
    assert delta_polynomial(OMEGA0, V0) == omega0_delta_closed_form()
    assert delta_polynomial(OMEGA0, V0)(0, 0) == -27


@pytest.mark.parametrize("t", TABLE_TYPES + [T113], ids=str)
def test_delta_polynomial_matches_pointwise(t):
    v = complete_type(t)
    d = delta_polynomial(t, v)
    rng = random.Random(str(t))
    for _ in range(200):
        m, n = rng.randint(-60, 60), rng.randint(-60, 60)
        assert d(m, n) == discriminant(family_matrix(t, v, m, n))


def test_tube_identities():
    lower, upper = tube_identity_residuals()
    assert lower.is_zero() and upper.is_zero()


def test_omega0_parabolas():
    pp = parabola_coefficients(OMEGA0, V0)
    assert (pp.alpha1, pp.beta1, pp.gamma1) == (Fraction(-1, 4), 0, 0)
    assert (pp.alpha2, pp.beta2, pp.gamma2) == (Fraction(1, 4), 0, 0)
    m, n = BiPoly.m(), BiPoly.n()
    assert pp.p1_poly() == m + n * n / 4
    assert pp.p2_poly() == n - m * m / 4
    assert parabola_coefficients(HessenbergType.parse("0,1|1,0,2"), (1, 0, 1)).alpha1 == Fraction(-1, 2)


@pytest.mark.parametrize("t", TABLE_TYPES, ids=str)
def test_parabola_shapes_and_identity(t):
    v = complete_type(t)
    pp = parabola_coefficients(t, v)
    p1, p2 = pp.p1_poly(), pp.p2_poly()
    assert p1.coefficient(1, 0) == 1
    # p2 = n/a21 - alpha2 s^2 - beta2 s - gamma2 with s = m - (a11/a21) n
    sv = BiPoly.m() - BiPoly.n() * Fraction(t.a11, t.a21)
    assert p2 + pp.alpha2 * sv * sv + pp.beta2 * sv + pp.gamma2 == BiPoly.n() / t.a21
    s, residual = parabola_identity_check(t, v)
    assert s == -1 and residual.degree() <= 2


def test_omega0_parabola_residual():
    s, residual = parabola_identity_check(OMEGA0, V0)
    m, n = BiPoly.m(), BiPoly.n()
    assert s == -1 and residual == -2 * m * n - 27


def test_asymptotic_examples():
    assert asymptotic_nrs_test(OMEGA0, V0, -10, 0, 1) is AsymptoticRegion.INSIDE_SHRUNK
    assert asymptotic_nrs_test(OMEGA0, V0, 10, 0, 1) is AsymptoticRegion.OUTSIDE_GROWN
    assert asymptotic_nrs_test(OMEGA0, V0, 0, 0, Fraction(1, 3)) is AsymptoticRegion.BOUNDARY
    assert delta_polynomial(OMEGA0, V0)(-10, 0) == -4027


def test_normalization_examples():
    nz = normalization(OMEGA0, V0)
    assert nz.linear == ((1, 0), (0, 1)) and nz.offset == (0, 0)
    assert nz.X == Mat3.identity()
    nz = normalization(T113, (0, 0, -1))
    rng = random.Random(7)
    for _ in range(50):
        m, n = rng.randint(-40, 40), rng.randint(-40, 40)
        assert nz.check(m, n)
        h = family_matrix(T113, (0, 0, -1), m, n)
        assert nz.image(m, n)[1] == h.trace()  # n' is the trace
    assert nz.image(0, 1)[1] - nz.image(0, 0)[1] == T113.a32


@pytest.mark.parametrize("t", TABLE_TYPES, ids=str)
def test_normalization_all_table_types(t):
    v = complete_type(t)
    nz = normalization(t, v)
    for m in range(-3, 4):
        for n in range(-3, 4):
            assert nz.check(m, n)


def test_ray_leading_coefficients():
    assert ray_leading_coefficient_check(OMEGA0, V0, 1)
    assert ray_polynomial(OMEGA0, V0, 1)[4] == Fraction(1, 4)
    assert ray_leading_coefficient_check(OMEGA0, V0, -1)
    assert ray_polynomial(OMEGA0, V0, -1)[4] == Fraction(-1, 4)
    for t in TABLE_TYPES[:6]:
        assert poly_degree(ray_polynomial(t, complete_type(t), 0)) < 4
        assert expected_ray_leading(t, 2) == Fraction(t.a21 * t.a32 ** 5, 2)
