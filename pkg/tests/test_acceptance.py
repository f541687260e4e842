"""Acceptance criteria, one check per criterion.

Run under pytest (one test per criterion, each printing a PASS/FAIL line)
or directly with ``python tests/test_acceptance.py``.
"""

import random
import sys
import tempfile
import time
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import random_nrs, random_unimodular, conjugate  # noqa: E402
from sl3hess.exact import BiPoly, Mat3, charpoly_coeffs  # noqa: E402
from sl3hess.hessenberg import OMEGA0, V0, HessenbergType, RaySpec, complete_type, complexity  # noqa: E402
from sl3hess.klein_voronoi import factor_sail  # noqa: E402
from sl3hess.reduction import (  # noqa: E402
    box_search_min,
    integer_conjugate,
    is_sigma_reduced,
    min_md_over_candidates,
)
from sl3hess.spectra import (  # noqa: E402
    AsymptoticRegion,
    SpectrumClass,
    asymptotic_nrs_test,
    delta_polynomial,
    normalization,
    parabola_identity_check,
    ray_leading_coefficient_check,
    spectrum_class,
    tube_identity_residuals,
)
from sl3hess.hessenberg import family_matrix  # noqa: E402
from sl3hess.survey import (  # noqa: E402
    CENSUS_TABLE,
    Config,
    count_nonreduced_stabilized,
    is_nrs_ray,
    ray_diagnostics,
    scan_ray,
)

TABLE_TYPES = [HessenbergType.parse(t) for t, _, _ in CENSUS_TABLE]
T102 = HessenbergType.parse("0,1|1,0,2")
V102 = (1, 0, 1)
T113 = HessenbergType.parse("1,2|1,1,3")
V113 = (0, 0, -1)
ASSORTED = [OMEGA0, T102, HessenbergType.parse("0,1|1,1,2"), HessenbergType.parse("1,2|0,0,1"),
            HessenbergType.parse("0,1|3,2,4"), T113]
ASSORTED_V = [V0, V102, None, None, None, V113]

CRITERIA = {}


def criterion(number, title):
    def register(fn):
        CRITERIA[number] = (title, fn)
        return fn
    return register


def completion(t, v):
    return v if v is not None else complete_type(t)


@criterion(1, "complexity of the 18 tabulated types")
def c01():
    got = [complexity(t) for t in TABLE_TYPES]
    want = [1, 2, 2, 3, 3, 3, 3, 3, 3, 4, 4, 4, 4, 4, 4, 4, 4, 4]
    return got == want, f"complexities {got}"


@criterion(2, "closed form of the <0,1|0,0,1> discriminant")
def c02():
    m, n = BiPoly.m(), BiPoly.n()
    closed = (m * m - 4 * n) * (n * n + 4 * m) - 2 * m * n - 27
    d = delta_polynomial(OMEGA0, V0)
    return d == closed, f"{len(d.terms)} coefficients compared exactly"


@criterion(3, "sum-of-squares bounds as polynomial identities")
def c03():
    lower, upper = tube_identity_residuals()
    return lower.is_zero() and upper.is_zero(), "both residuals are the zero polynomial"


@criterion(4, "parabola product matches the quartic part for all 18 types")
def c04():
    degrees, signs = [], set()
    for t in TABLE_TYPES:
        s, residual = parabola_identity_check(t, complete_type(t))
        degrees.append(residual.degree())
        signs.add(s)
    ok = max(degrees) <= 2 and signs == {-1}
    return ok, f"max residual degree {max(degrees)}, signs {sorted(signs)}"


@criterion(5, "rational normalization onto <0,1|0,0,1>")
def c05():
    rng = random.Random(5)
    bad = 0
    for t, v in zip(ASSORTED, ASSORTED_V):
        nz = normalization(t, completion(t, v))
        for _ in range(50):
            bad += not nz.check(rng.randint(-100, 100), rng.randint(-100, 100))
    return bad == 0, f"{6 * 50} exact conjugation checks, {bad} failures"


@criterion(6, "degree-4 coefficient along rays")
def c06():
    bad = []
    for t, v in zip(ASSORTED, ASSORTED_V):
        for eps in (1, -1, Fraction(1, 2), Fraction(-1, 2)):
            if not ray_leading_coefficient_check(t, completion(t, v), eps):
                bad.append((str(t), str(eps)))
    return not bad, f"24 symbolic checks, failures {bad}"


@criterion(7, "certified sail vertices of the example matrix")
def c07():
    began = time.monotonic()
    sail = factor_sail(Mat3.parse("0,0,1;1,0,1;0,1,3"), 20)
    secs = time.monotonic() - began
    want = {(1, 0, 0), (0, 1, 0), (0, 0, 1)}
    got = want & sail.certified_sources()
    return got == want and secs < 10, f"certified {sorted(got)} in {secs:.1f}s"


@lru_cache(maxsize=None)
def stabilized(text, v=None):
    return count_nonreduced_stabilized(HessenbergType.parse(text), v, Config(), max_half=512)


@criterion(8, "nonreduced census")
def c08():
    began = time.monotonic()
    figures = [("0,1|0,0,1", None, 0), ("0,1|1,0,2", None, 12), ("0,1|1,1,2", None, 12), ("1,2|1,1,3", V113, 27)]
    figure_bad = [(t, r.count) for t, v, want in figures
                  if not (r := stabilized(t, v)).stabilized or r.count != want]
    table_bad = []
    for text, _, want in CENSUS_TABLE:
        r = stabilized(text)
        if not r.stabilized or r.count != want:
            table_bad.append(f"<{text}> {r.count} (window {r.window}) vs {want}")
    secs = time.monotonic() - began
    detail = (f"figure counts {'match' if not figure_bad else figure_bad}; "
              f"{18 - len(table_bad)}/18 table entries match; {secs:.0f}s")
    if table_bad:
        detail += "; stable mismatches: " + ", ".join(table_bad)
    return not figure_bad and not table_bad and secs < 1800, detail


@criterion(9, "odd cells of <0,1|1,0,2> are reduced by parity")
def c09():
    began = time.monotonic()
    bad, skipped, odd = [], 0, []
    for m in range(-20, 21):
        for n in range(-20, 21):
            if (m + n) % 2 == 0:
                continue
            h = family_matrix(T102, V102, m, n)
            if spectrum_class(h) is SpectrumClass.REDUCIBLE:
                skipped += 1
                continue
            odd.append(h)
            v = is_sigma_reduced(h, box_bound=20)
            if v.verdict != "Reduced" or v.certificate != "ModQObstruction(2)":
                bad.append((m, n))
    rng = random.Random(9)
    ones = [h.text() for h in rng.sample(odd, 50) if box_search_min(h, 50)[0] == 1]
    secs = time.monotonic() - began
    ok = not bad and not ones and secs < 300
    return ok, (f"{len(odd)} irreducible odd cells certified, {skipped} reducible cells skipped, "
                f"box search found value 1 in {len(ones)} of 50; {secs:.0f}s")


@criterion(10, "at most one nonreduced matrix per NRS ray")
def c10():
    began = time.monotonic()
    with tempfile.TemporaryDirectory() as d:
        cfg = Config(cache_dir=d)
        worst, rays = {}, {}
        for t, v in ((T102, V102), (OMEGA0, V0)):
            most, count = 0, 0
            for index in (1, 2):
                for m in range(-10, 11):
                    for n in range(-10, 11):
                        r = RaySpec(t, v, (m, n), index)
                        if is_nrs_ray(r):
                            count += 1
                            most = max(most, len(scan_ray(r, 40, cfg).nonreduced()))
            worst[str(t)], rays[str(t)] = most, count
    secs = time.monotonic() - began
    ok = worst[str(T102)] <= 1 and worst[str(OMEGA0)] == 0 and secs < 900
    return ok, f"NRS rays scanned {rays}, most nonreduced on one ray {worst}; {secs:.0f}s"


@criterion(11, "exact slope of the MD-characteristic along rays")
def c11():
    rng = random.Random(11)
    points = [(1, 0, 0), (1, 1, 0), (2, -1, 0), (0, 1, 0), (-3, 2, 0), (5, 3, 0)]
    bad, n_rays = [], 0
    for t, v, k in ((OMEGA0, V0, 4), (T102, V102, 3), (T113, V113, 3)):
        for _ in range(k):
            r = RaySpec(t, v, (rng.randint(-10, 10), rng.randint(-10, 10)), 1)
            n_rays += 1
            for p in points:
                d = ray_diagnostics(r, t_values=(), point=p)
                if not d.slope_ok or (p == (1, 0, 0) and d.expected_slope != 0):
                    bad.append((str(t), r.base, p))
    return not bad, f"{n_rays} rays x {len(points)} points, failures {bad}"


@criterion(12, "orbit axis ratio grows like t^(1/2)")
def c12():
    began = time.monotonic()
    exps = []
    for base in [(0, 0), (3, -2), (-4, 5), (6, 1)]:
        r = RaySpec(OMEGA0, V0, base, 1)
        exps.append(ray_diagnostics(r, t_values=(1000, 3000, 10000)).exponent)
    secs = time.monotonic() - began
    ok = all(abs(e - 0.5) <= 0.05 for e in exps) and secs < 60
    return ok, "exponents " + ", ".join(f"{e:.5f}" for e in exps) + f"; {secs:.1f}s"


@criterion(13, "candidate minimum and conjugacy against oracles")
def c13():
    began = time.monotonic()
    rng = random.Random(13)
    ms = [random_nrs(rng, 6) for _ in range(25)]
    mismatched = [m.text() for m in ms if min_md_over_candidates(m)[0] != box_search_min(m, 30)[0]]
    missed = []
    for m in ms[:20]:
        x = random_unimodular(rng, 5)
        if not integer_conjugate(m, conjugate(m, x)):
            missed.append(m.text())
    distinct = [(a, b) for a in ms for b in ms if charpoly_coeffs(a) != charpoly_coeffs(b)][:50]
    false_pos = sum(integer_conjugate(a, b) for a, b in distinct)
    secs = time.monotonic() - began
    ok = not mismatched and not missed and not false_pos and secs < 600
    return ok, (f"minimum mismatches {len(mismatched)}/25, conjugate pairs missed {len(missed)}/20, "
                f"distinct-charpoly pairs called conjugate {false_pos}/{len(distinct)}; {secs:.0f}s")


@criterion(14, "parabola regions bracket the NRS cells on an annulus")
def c14():
    inner_bad, outer_bad, cells = [], [], 0
    half = Fraction(1, 2)
    for m in range(-60, 61):
        for n in range(-60, 61):
            if not 900 <= m * m + n * n <= 3600:
                continue
            cells += 1
            region = asymptotic_nrs_test(OMEGA0, V0, m, n, half)
            nrs = spectrum_class(family_matrix(OMEGA0, V0, m, n)) is SpectrumClass.NRS
            if region is AsymptoticRegion.INSIDE_SHRUNK and not nrs:
                inner_bad.append((m, n))
            if nrs and region is AsymptoticRegion.OUTSIDE_GROWN:
                outer_bad.append((m, n))
    ok = not inner_bad and not outer_bad
    return ok, f"{cells} cells, violations inner {inner_bad} outer {outer_bad}"


def run(number):
    title, fn = CRITERIA[number]
    ok, detail = fn()
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}: {title}: {detail}"
    return ok, line


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    ok, line = run(number)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [run(k) for k in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
