import itertools

import numpy as np
import pytest
from scipy.spatial import Delaunay

from sl3hess.errors import RegionTooLarge, SpectrumMismatch
from sl3hess.exact import Mat3, charpoly_coeffs, is_primitive, md_characteristic
from sl3hess.hessenberg import OMEGA0, V0, family_matrix, reduce_to_perfect
from sl3hess.klein_voronoi import (
    candidate_region,
    candidate_vectors,
    ellipsoid_points,
    factor_sail,
    is_convex_chain,
    lll_reduce,
    orbit_points,
    pi_project,
    pi_project_many,
    real_root,
    spectral_basis,
)
from sl3hess.reduction import box_search_min

from conftest import EXAMPLE, random_nrs


def test_example_basis():
    b = spectral_basis(EXAMPLE)
    assert b.r == pytest.approx(3.3829757679, abs=1e-9)
    assert b.residual <= 1e-12
    assert b.r * abs(b.c) ** 2 == pytest.approx(1.0, abs=1e-10)
    assert b.c.imag > 0


def test_spectrum_mismatch():
    with pytest.raises(SpectrumMismatch):
        spectral_basis(family_matrix(OMEGA0, V0, 10, 0))


def test_real_root_against_numpy(rng):
    for _ in range(30):
        m = random_nrs(rng, 6)
        b1, b2, b3 = charpoly_coeffs(m)
        roots = np.roots([-1, b1, -b2, b3])
        real = roots[np.argmin(np.abs(roots.imag))].real
        assert real_root(b1, b2, b3) == pytest.approx(real, rel=1e-9)
        basis = spectral_basis(m)
        assert basis.residual <= 1e-12
        assert basis.r * abs(basis.c) ** 2 == pytest.approx(1.0, abs=1e-10)


def test_pi_projection_follows_the_eigen_action(rng):
    for _ in range(5):
        m = random_nrs(rng, 4)
        b = spectral_basis(m)
        ws = np.array([[rng.randint(-20, 20) for _ in range(3)] for _ in range(100)])
        before = pi_project_many(b, ws)
        after = pi_project_many(b, ws @ np.array(m.rows).T)
        scale = 1 + np.abs(before).max()
        assert np.allclose(after[:, 0], b.r * before[:, 0], atol=1e-9 * scale * abs(b.r))
        assert np.allclose(after[:, 1], before[:, 1] / np.sqrt(abs(b.r)), atol=1e-9 * scale)


def test_pi_project_zero_and_eigenline():
    b = spectral_basis(EXAMPLE)
    p = pi_project(b, (0, 0, 0))
    assert (p.x, p.rho) == (0.0, 0.0)
    approx = tuple(int(round(a)) for a in 1000 * b.g1 / np.abs(b.g1).max())
    q = pi_project(b, approx)
    assert q.rho < 1e-2 * abs(q.x)
    assert q.source == approx


def test_orbit_points():
    b = spectral_basis(EXAMPLE)
    pts = orbit_points(b, (1, 0, 0), 4)
    assert len(pts) == 4
    coords = b.coords(pts)
    # quarter turns in the (y, z) plane
    for k in range(4):
        y, z = coords[k, 1:]
        assert np.allclose(coords[(k + 1) % 4, 1:], [-z, y], atol=1e-12)
    many = orbit_points(b, (2, -1, 5), 64)
    proj = pi_project_many(b, many)
    assert np.allclose(proj, proj[0], atol=1e-9)
    # orbit samples are not integer vectors, so Delta is not constant on them
    a = np.array(EXAMPLE.rows, dtype=float)
    vals = [abs(np.linalg.det(np.stack([w, a @ w, a @ a @ w], axis=1))) for w in many[:8]]
    assert np.allclose(vals, vals[0], rtol=1e-9)  # the real-valued form is orbit invariant
    on_line = orbit_points(b, b.g1 * 3.0, 16)
    assert np.allclose(on_line, b.g1 * 3.0, atol=1e-12)
    with pytest.raises(ValueError):
        orbit_points(b, (1, 0, 0), 3)


def test_example_sail_certified_vertices():
    sail = factor_sail(EXAMPLE, 20)
    certified = sail.certified_sources()
    assert {(1, 0, 0), (0, 1, 0), (0, 0, 1)} <= certified
    assert all(is_primitive(w) for w in certified)
    for _, line in sail.components():
        assert is_convex_chain(line)


def _below_chain(line, pts, tol=1e-9):
    """Points strictly between the chain and the corner."""
    xs = np.array([p.x for p in line])
    rs = np.array([p.rho for p in line])
    inside = (pts[:, 0] > xs[0]) & (pts[:, 0] < xs[-1])
    interp = np.interp(pts[inside, 0], xs, rs)
    return np.sum(pts[inside, 1] < interp * (1 - tol) - tol)


def test_sail_is_a_lower_hull(rng):
    for m in [EXAMPLE] + [random_nrs(rng, 3) for _ in range(3)]:
        sail = factor_sail(m, 8)
        b = spectral_basis(m)
        ws = np.array([w for w in itertools.product(range(-8, 9), repeat=3) if any(w)])
        proj = pi_project_many(b, ws)
        for sign, (_, line) in zip((1, -1), sail.components()):
            pts = np.abs(proj[sign * proj[:, 0] > 0])
            assert _below_chain(line, pts) == 0


def test_doubling_keeps_certified_vertices(rng):
    for _ in range(10):
        m = random_nrs(rng, 3)
        small = factor_sail(m, 6).certified_sources()
        large = factor_sail(m, 12).certified_sources()
        assert small <= large


def test_region_facets_match_scipy_hull():
    b = spectral_basis(EXAMPLE)
    region = candidate_region(EXAMPLE, (1, 0, 0), samples=32, basis=b)
    hull = Delaunay(region.vertices)
    rng = np.random.default_rng(3)
    lo, hi = region.vertices.min(axis=0), region.vertices.max(axis=0)
    pts = rng.uniform(lo - 0.2, hi + 0.2, size=(4000, 3))
    ours = region.contains(pts)
    theirs = hull.find_simplex(pts) >= 0
    assert np.mean(ours == theirs) > 0.995
    # disagreements only within a hair of the boundary
    bad = pts[ours != theirs]
    if len(bad):
        assert np.all(region.contains(bad, tol=1e-6))


def test_region_is_conservative():
    b = spectral_basis(EXAMPLE)
    p, q = (1, 0, 0), EXAMPLE @ (1, 0, 0)
    region = candidate_region(EXAMPLE, p, basis=b)
    ring_p = orbit_points(b, p, 1000)
    ring_q = orbit_points(b, q, 1000)
    t = np.linspace(0, 1, 7)[:, None, None]
    mix = (t * ring_p[None] + (1 - t) * ring_q[None]).reshape(-1, 3)
    assert region.contains(np.concatenate([ring_p, ring_q, mix])).all()
    assert region.contains(np.array([p, q], dtype=float)).all()


def test_region_volume_scales_cubically():
    b = spectral_basis(EXAMPLE)
    v1 = candidate_region(EXAMPLE, (1, 2, -1), basis=b).volume()
    v2 = candidate_region(EXAMPLE, (2, 4, -2), basis=b).volume()
    assert v2 / v1 == pytest.approx(8.0, rel=1e-6)


def test_region_on_eigenline_is_thin():
    b = spectral_basis(EXAMPLE)
    approx = tuple(int(round(a)) for a in 100 * b.g1 / np.abs(b.g1).max())
    region = candidate_region(EXAMPLE, approx, basis=b)
    length = region.x_hi - region.x_lo
    assert max(region.radius_lo, region.radius_hi) < 0.05 * length


def test_example_candidates():
    cands = candidate_vectors(EXAMPLE, (1, 0, 0))
    assert (1, 0, 0) in cands and (0, 1, 0) in cands
    assert (0, 0, 0) not in cands
    assert EXAMPLE @ (1, 0, 0) in cands


def test_candidate_minimum_matches_box_search(rng):
    for _ in range(10):
        m = random_nrs(rng, 4)
        cands = candidate_vectors(m)
        mu = min(md_characteristic(m, w) for w in cands)
        assert mu == box_search_min(m, 30, early_exit=False)[0]


def test_candidates_shifted_by_one_period(rng):
    for _ in range(5):
        m = random_nrs(rng, 4)
        p = (1, 0, 0)
        q = m @ p
        if not is_primitive(q):
            continue

        def reduced(start):
            cands = candidate_vectors(m, start)
            mu = min(md_characteristic(m, w) for w in cands)
            return {reduce_to_perfect(m, w) for w in cands if md_characteristic(m, w) == mu}

        assert reduced(p) == reduced(q)


def test_example_minima_form_one_orbit():
    cands = candidate_vectors(EXAMPLE)
    mins = [w for w in cands if md_characteristic(EXAMPLE, w) == 1]
    assert mins == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]
    # A e1 = e2 and A e2 = e3: a single orbit of the operator
    assert EXAMPLE @ (1, 0, 0) == (0, 1, 0) and EXAMPLE @ (0, 1, 0) == (0, 0, 1)


def test_region_budget():
    with pytest.raises(RegionTooLarge):
        candidate_vectors(EXAMPLE, (1, 0, 0), budget=0)


def test_ellipsoid_points_against_brute_force():
    rng = np.random.default_rng(11)
    for _ in range(10):
        lin = rng.normal(size=(3, 3)) / 3
        center = rng.normal(size=3) * 2
        found = set(ellipsoid_points(lin, center, 1.0))
        brute = set()
        for w in itertools.product(range(-25, 26), repeat=3):
            d = lin @ (np.array(w) - center)
            if d @ d <= 1.0 - 1e-9:
                brute.add(w)
        assert brute <= found
        assert all(np.sum((lin @ (np.array(w) - center)) ** 2) <= 1 + 1e-6 for w in found)


def test_lll_is_unimodular_and_shorter():
    b = np.array([[1.0, 0, 0], [0, 1, 0], [1000.3, 999.7, 1e-3]]).T
    red, t = lll_reduce(b)
    assert round(abs(np.linalg.det(t))) == 1
    assert np.allclose(b @ t, red)
    assert np.linalg.norm(red, axis=0).max() <= np.linalg.norm(b, axis=0).max()
