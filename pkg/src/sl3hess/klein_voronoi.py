"""Floating point spectral geometry of operators with one real and two
complex conjugate eigenvalues.

In the eigenbasis g1 (real eigenvector), g2 + i*g3 (complex eigenvector)
a vector has coordinates (x, y, z); the one-parameter group commuting with
the operator rotates (y, z), so every orbit is an ellipse in the plane of
constant x and is represented by the point (x, rho), rho = hypot(y, z), of
the half-plane pi_+.  The operator acts on pi_+ by (x, rho) -> (r*x, |c|*rho).

Nothing here is exact.  Regions are padded outward so that every integer
point of the true region is enumerated; callers re-evaluate the
MD-characteristic exactly on what comes out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import RegionTooLarge, SpectrumMismatch
from .exact import Mat3, charpoly_coeffs, is_primitive
from .spectra import SpectrumClass, classify_coeffs

BASIS_TOL = 1e-12
DEFAULT_SAMPLES = 256
DEFAULT_PADDING = 1e-6
DEFAULT_CELL_BUDGET = 10 ** 9


# -- spectral basis ----------------------------------------------------------


def _monic_sign(b, num: int, den_exp: int) -> int:
    """Sign of t^3 - b1 t^2 + b2 t - b3 at t = num / 2**den_exp, exactly."""
    b1, b2, b3 = b
    d = 1 << den_exp
    v = num ** 3 - b1 * num * num * d + b2 * num * d * d - b3 * d * d * d
    return (v > 0) - (v < 0)


def real_root(b1: int, b2: int, b3: int, bits: int = 40) -> float:
    """The unique real root of -t^3 + b1 t^2 - b2 t + b3 (negative
    discriminant), bracketed with exact sign evaluations and then polished
    by Newton steps kept inside the bracket."""
    b = (b1, b2, b3)
    hi = 1 + max(abs(b1), abs(b2), abs(b3))
    lo = -hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        s = _monic_sign(b, mid, 0)
        if s == 0:
            return float(mid)
        if s < 0:
            lo = mid
        else:
            hi = mid
    # dyadic bisection: the root lies in (lo_num, hi_num) / 2**k
    k, lo_num, hi_num = 0, lo, hi
    while k < bits:
        k += 1
        lo_num, hi_num = 2 * lo_num, 2 * hi_num
        mid = lo_num + 1
        s = _monic_sign(b, mid, k)
        if s == 0:
            return mid / 2 ** k
        if s < 0:
            lo_num = mid
        else:
            hi_num = mid
    a, c = lo_num / 2 ** k, hi_num / 2 ** k
    t = (a + c) / 2
    for _ in range(3):
        f = ((t - b1) * t + b2) * t - b3
        fp = (3 * t - 2 * b1) * t + b2
        if fp == 0:
            break
        nt = t - f / fp
        if not a <= nt <= c:
            break
        t = nt
    return t


def _null_vector(a: np.ndarray) -> np.ndarray:
    _, _, vh = np.linalg.svd(a)
    return vh[-1].conj()


@dataclass(frozen=True, eq=False)
class SpectralBasis:
    matrix: Mat3
    r: float
    c: complex
    g1: np.ndarray
    g2: np.ndarray
    g3: np.ndarray
    basis: np.ndarray
    inverse: np.ndarray
    residual: float

    def coords(self, w) -> np.ndarray:
        """Eigen-coordinates (x, y, z) of one vector or of rows of an array."""
        w = np.asarray(w, dtype=float)
        return w @ self.inverse.T

    @property
    def rotation(self) -> np.ndarray:
        """Action of the operator on (y, z)."""
        a, b = self.c.real, self.c.imag
        return np.array([[a, b], [-b, a]])


def spectral_basis(m: Mat3) -> SpectralBasis:
    b1, b2, b3 = charpoly_coeffs(m)
    cls = classify_coeffs(b1, b2, b3)
    if cls is not SpectrumClass.NRS:
        raise SpectrumMismatch(f"{m.text()} is {cls.value}, not NRS")
    r = real_root(b1, b2, b3)
    re = (b1 - r) / 2
    im = math.sqrt(max(b3 / r - re * re, 0.0))
    c = complex(re, im)

    a = np.array(m.rows, dtype=float)
    g1 = _null_vector(a - r * np.eye(3)).real
    g1 = g1 / np.linalg.norm(g1)
    if g1[np.argmax(np.abs(g1))] < 0:
        g1 = -g1
    u = _null_vector(a.astype(complex) - c * np.eye(3))
    # rotate the phase of u so that its real and imaginary parts are the
    # principal axes of the orbit ellipses
    pair = np.stack([u.real, u.imag], axis=1)
    _, _, vt = np.linalg.svd(pair)
    rot = vt.T
    if np.linalg.det(rot) < 0:
        rot[:, 1] = -rot[:, 1]
    g2, g3 = (pair @ rot).T
    scale = np.linalg.norm(g2)
    g2, g3 = g2 / scale, g3 / scale

    basis = np.stack([g1, g2, g3], axis=1)
    inverse = np.linalg.inv(basis)
    norm_a = np.linalg.norm(a, 2)
    uc = g2 + 1j * g3
    res1 = np.linalg.norm(a @ g1 - r * g1) / (norm_a * np.linalg.norm(g1))
    res2 = np.linalg.norm(a @ uc - c * uc) / (norm_a * np.linalg.norm(uc))
    return SpectralBasis(m, r, c, g1, g2, g3, basis, inverse, float(max(res1, res2)))


# -- the half-plane pi_+ -----------------------------------------------------


@dataclass(frozen=True)
class PiPoint:
    x: float
    rho: float
    source: Optional[tuple] = None


def pi_project(basis: SpectralBasis, w) -> PiPoint:
    x, y, z = basis.coords(w)
    src = tuple(int(a) for a in w) if all(float(a).is_integer() for a in w) else None
    return PiPoint(float(x), float(math.hypot(y, z)), src)


def pi_project_many(basis: SpectralBasis, ws: np.ndarray) -> np.ndarray:
    """(k, 2) array of (x, rho) for the rows of ``ws``."""
    c = basis.coords(ws)
    return np.stack([c[:, 0], np.hypot(c[:, 1], c[:, 2])], axis=1)


def orbit_points(basis: SpectralBasis, w, samples: int) -> np.ndarray:
    """``samples`` points of the orbit ellipse through ``w``, starting at ``w``."""
    if samples < 4:
        raise ValueError("need at least 4 samples")
    x, y, z = basis.coords(w)
    th = 2 * np.pi * np.arange(samples) / samples
    cs, sn = np.cos(th), np.sin(th)
    yy = y * cs - z * sn
    zz = y * sn + z * cs
    return np.outer(np.full(samples, x), basis.g1) + np.outer(yy, basis.g2) + np.outer(zz, basis.g3)


# -- factor-sails --------------------------------------------------------------


@dataclass
class FactorSail:
    """Two polylines in pi_+, for x > 0 and x < 0 (stored with |x|)."""

    positive: list = field(default_factory=list)
    negative: list = field(default_factory=list)
    certified: dict = field(default_factory=dict)
    bound: int = 0

    def components(self):
        return (("positive", self.positive), ("negative", self.negative))

    def certified_sources(self) -> set:
        return {src for src, ok in self.certified.items() if ok}

    def to_json(self) -> dict:
        out = {"bound": self.bound}
        for name, line in self.components():
            out[name] = [
                {"source": list(p.source), "pi": [p.x, p.rho], "certified": self.certified[p.source]}
                for p in line
            ]
        return out


def _box_vectors(bound: int) -> np.ndarray:
    r = np.arange(-bound, bound + 1)
    g = np.stack(np.meshgrid(r, r, r, indexing="ij"), axis=-1).reshape(-1, 3)
    return g[np.any(g != 0, axis=1)]


def _cross2(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _corner_chain(pts: np.ndarray) -> list:
    """Indices of the boundary of conv(pts) + (positive quadrant) that faces
    the origin, ordered by increasing x."""
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    lower: list = []
    for i in order:
        p = pts[i]
        while len(lower) >= 2 and _cross2(pts[lower[-2]], pts[lower[-1]], p) <= 0:
            lower.pop()
        lower.append(i)
    # stop at the lowest point; beyond it edges rise
    k = min(range(len(lower)), key=lambda j: (pts[lower[j], 1], pts[lower[j], 0]))
    return lower[: k + 1]


def factor_sail(m: Mat3, bound: int) -> FactorSail:
    """Sail vertices among the integer vectors with ``|w|_inf <= bound``.

    A vertex is certified when some supporting line through it has all
    integer vectors below it (in the quadrant) inside the enumerated box:
    every w satisfies |w|_2 <= |x| |g1| + rho sigma, so the triangle cut off
    by the line is covered once both its corners satisfy that bound.
    """
    if bound < 2:
        raise ValueError("bound must be at least 2")
    basis = spectral_basis(m)
    ws = _box_vectors(bound)
    xr = pi_project_many(basis, ws)
    g1_norm = float(np.linalg.norm(basis.g1))
    sigma = float(np.linalg.norm(np.stack([basis.g2, basis.g3], axis=1), 2))
    sail = FactorSail(bound=bound)
    for sign, name in ((1, "positive"), (-1, "negative")):
        mask = sign * xr[:, 0] > 0
        sub_w, sub = ws[mask], np.abs(xr[mask])
        chain = _corner_chain(sub)
        line = [PiPoint(float(sub[i, 0]), float(sub[i, 1]), tuple(int(a) for a in sub_w[i])) for i in chain]
        setattr(sail, name, line)
        for j, p in enumerate(line):
            sail.certified[p.source] = j > 0 and _supported(line, j, g1_norm, sigma, bound)
    return sail


def _supported(line: list, j: int, g1_norm: float, sigma: float, bound: int) -> bool:
    p, q = line[j - 1], line[j]
    left = (q.rho - p.rho) / (q.x - p.x)
    right = 0.0
    if j + 1 < len(line):
        n = line[j + 1]
        right = (n.rho - q.rho) / (n.x - q.x)
    slope = (left + right) / 2
    if slope >= 0:
        return False
    rho0 = q.rho - slope * q.x  # intercept with x = 0
    x0 = -rho0 / slope  # intercept with rho = 0
    reach = max(x0 * g1_norm, rho0 * sigma)
    return reach * (1 + 1e-9) < bound


def is_convex_chain(line: list) -> bool:
    pts = [(p.x, p.rho) for p in line]
    return all(_cross2(pts[i], pts[i + 1], pts[i + 2]) > 0 for i in range(len(pts) - 2))


# -- candidate regions -------------------------------------------------------------


@dataclass(eq=False)
class ConvexRegion3:
    """Padded convex hull of the orbits of two points.

    Each orbit is replaced by a regular polygon circumscribed about its
    ellipse; the two polygons are aligned, so the hull is a polygonal
    frustum with two caps and one planar quadrilateral per polygon edge.
    ``facets`` holds rows (n, d) with n . w + d <= 0 inside, in integer
    coordinates.
    """

    basis: SpectralBasis
    x_lo: float
    x_hi: float
    radius_lo: float
    radius_hi: float
    samples: int
    vertices: np.ndarray
    facets: np.ndarray

    def contains(self, points, tol: float = 0.0) -> np.ndarray:
        p = np.atleast_2d(np.asarray(points, dtype=float))
        # each cross-section is a regular polygon about the axis, so a point
        # can only leave through the caps or the lateral facet of its sector
        c = self.basis.coords(p)
        sector = np.floor(np.arctan2(c[:, 2], c[:, 1]) % (2 * np.pi) * self.samples / (2 * np.pi))
        sector = sector.astype(np.int64) % self.samples
        idx = np.stack([np.zeros_like(sector), np.ones_like(sector)]
                       + [2 + (sector + k) % self.samples for k in (-1, 0, 1)], axis=1)
        rows = self.facets[idx]
        vals = np.einsum("ij,ikj->ik", p, rows[:, :, :3]) + rows[:, :, 3]
        scale = self.facet_norms[idx] * (1.0 + np.abs(p).max(axis=1, keepdims=True))
        return np.all(vals <= tol * scale, axis=1)

    @property
    def facet_norms(self) -> np.ndarray:
        if getattr(self, "_norms", None) is None:
            self._norms = np.linalg.norm(self.facets[:, :3], axis=1)
        return self._norms

    def bounding_box(self) -> tuple:
        lo = np.floor(self.vertices.min(axis=0)).astype(np.int64)
        hi = np.ceil(self.vertices.max(axis=0)).astype(np.int64)
        return lo, hi

    def volume(self) -> float:
        """Volume of the frustum in integer coordinates."""
        h = self.x_hi - self.x_lo
        r0, r1 = self.radius_lo, self.radius_hi
        poly = self.samples / 2 * math.sin(2 * math.pi / self.samples)  # unit-circumradius polygon area
        return abs(np.linalg.det(self.basis.basis)) * h * poly * (r0 * r0 + r0 * r1 + r1 * r1) / 3

    def lattice_points(self, budget: int = DEFAULT_CELL_BUDGET) -> np.ndarray:
        """All integer points inside as a (k, 3) int64 array, via a bounding
        ellipsoid filtered block by block."""
        est = 2.5 * self.volume() + 1
        if est > budget:
            raise RegionTooLarge(int(est), budget)
        xm = (self.x_lo + self.x_hi) / 2
        hx = (self.x_hi - self.x_lo) / 2
        rmax = max(self.radius_lo, self.radius_hi)
        # cylinder |x - xm| <= hx, rho <= rmax lies in this ellipsoid
        scale = np.array([1 / (math.sqrt(2) * hx), 1 / (math.sqrt(2) * rmax), 1 / (math.sqrt(2) * rmax)])
        lin = scale[:, None] * self.basis.inverse
        center = self.basis.basis @ np.array([xm, 0.0, 0.0])
        kept = [np.zeros((0, 3), dtype=np.int64)]
        for block in ellipsoid_blocks(lin, center, 1.0 + 1e-9):
            for start in range(0, len(block), _FILTER_CHUNK):
                part = block[start:start + _FILTER_CHUNK]
                kept.append(part[self.contains(part, tol=1e-12)])
        return np.concatenate(kept)


_FILTER_CHUNK = 200_000


def _ring(x: float, radius: float, samples: int) -> np.ndarray:
    th = 2 * np.pi * np.arange(samples) / samples
    return np.stack([np.full(samples, x), radius * np.cos(th), radius * np.sin(th)], axis=1)


def hull_of_orbits(
    basis: SpectralBasis, p, q, samples: int = DEFAULT_SAMPLES, padding: float = DEFAULT_PADDING
) -> ConvexRegion3:
    cp, cq = basis.coords(p), basis.coords(q)
    (x0, r0), (x1, r1) = sorted([(cp[0], math.hypot(cp[1], cp[2])), (cq[0], math.hypot(cq[1], cq[2]))])
    span = x1 - x0
    slack = padding * max(span, abs(x0), abs(x1), 1e-300)
    x_lo, x_hi = x0 - slack, x1 + slack
    # keep the lateral surface a straight interpolation between the rings
    slope = (r1 - r0) / span if span > 0 else 0.0
    circ = (1.0 / math.cos(math.pi / samples)) * (1 + padding)
    rad_pad = padding * max(r0, r1)
    radius_lo = (r0 - slope * slack) * circ + rad_pad
    radius_hi = (r1 + slope * slack) * circ + rad_pad
    radius_lo, radius_hi = max(radius_lo, rad_pad), max(radius_hi, rad_pad)
    ring_lo = _ring(x_lo, radius_lo, samples)
    ring_hi = _ring(x_hi, radius_hi, samples)
    eig_vertices = np.concatenate([ring_lo, ring_hi])
    vertices = eig_vertices @ basis.basis.T

    # facets in eigen-coordinates, then pulled back: n.(G^-1 w) + d = (G^-T n).w + d
    caps = np.array([[-1.0, 0.0, 0.0, x_lo], [1.0, 0.0, 0.0, -x_hi]])
    a, b = ring_lo, np.roll(ring_lo, -1, axis=0)
    nrm = np.cross(b - a, ring_hi - a)
    d = -np.einsum("ij,ij->i", nrm, a)
    axis_pt = np.array([(x_lo + x_hi) / 2, 0.0, 0.0])
    flip = np.where(nrm @ axis_pt + d > 0, -1.0, 1.0)
    lateral = np.concatenate([nrm, d[:, None]], axis=1) * flip[:, None]
    eig_facets = np.concatenate([caps, lateral])
    normals = eig_facets[:, :3] @ basis.inverse
    facets = np.concatenate([normals, eig_facets[:, 3:]], axis=1)
    return ConvexRegion3(basis, x_lo, x_hi, radius_lo, radius_hi, samples, vertices, facets)


def candidate_region(
    m: Mat3, p, *, samples: int = DEFAULT_SAMPLES, padding: float = DEFAULT_PADDING, basis=None
) -> ConvexRegion3:
    """The padded hull of the orbits of p and s*M p, s the sign of the real
    eigenvalue.

    With s*M the two orbits lie in the same half-space x > 0 or x < 0, so
    the region contains the whole sail between them.
    """
    basis = basis or spectral_basis(m)
    if not any(p):
        raise ValueError("p must be nonzero")
    return hull_of_orbits(basis, p, _step(m, basis, p), samples, padding)


def _step(m: Mat3, basis: SpectralBasis, p) -> tuple:
    q = m @ tuple(p)
    return q if basis.r > 0 else tuple(-a for a in q)


def candidate_array(
    m: Mat3,
    p=(1, 0, 0),
    *,
    samples: int = DEFAULT_SAMPLES,
    padding: float = DEFAULT_PADDING,
    budget: int = DEFAULT_CELL_BUDGET,
    basis=None,
) -> np.ndarray:
    """Nonzero integer points in the regions of p and of s*M p, as sorted
    unique rows of an int64 array."""
    basis = basis or spectral_basis(m)
    p = tuple(p)
    if not is_primitive(p):
        raise ValueError(f"{p} is not primitive")
    mp = _step(m, basis, p)
    parts = [np.array([p, mp, m @ p], dtype=np.int64)]
    for a in (p, mp):
        region = candidate_region(m, a, samples=samples, padding=padding, basis=basis)
        parts.append(region.lattice_points(budget))
    return _unique_nonzero_rows(np.concatenate(parts))


def _unique_nonzero_rows(pts: np.ndarray) -> np.ndarray:
    """Sorted unique nonzero rows; packs each row into one integer key."""
    lo = pts.min(axis=0)
    span = pts.max(axis=0) - lo + 1
    if np.prod(span.astype(float)) >= 2.0 ** 62:
        pts = np.unique(pts, axis=0)
    else:
        shifted = pts - lo
        key = (shifted[:, 0] * span[1] + shifted[:, 1]) * span[2] + shifted[:, 2]
        _, first = np.unique(key, return_index=True)
        pts = pts[first]
    return pts[np.any(pts != 0, axis=1)]


def candidate_vectors(m: Mat3, p=(1, 0, 0), **kwargs) -> list:
    """:func:`candidate_array` as a sorted list of tuples."""
    return [tuple(int(a) for a in w) for w in candidate_array(m, p, **kwargs)]


# -- lattice enumeration -----------------------------------------------------------


def lll_reduce(b: np.ndarray, delta: float = 0.99) -> tuple[np.ndarray, np.ndarray]:
    """LLL-reduce the columns of ``b``; returns (reduced, T) with reduced = b @ T."""
    b = np.array(b, dtype=float)
    n = b.shape[1]
    t = np.eye(n, dtype=np.int64)

    def gso(bb):
        bs = np.zeros_like(bb)
        mu = np.zeros((n, n))
        for i in range(n):
            v = bb[:, i].copy()
            for j in range(i):
                mu[i, j] = bb[:, i] @ bs[:, j] / (bs[:, j] @ bs[:, j])
                v -= mu[i, j] * bs[:, j]
            bs[:, i] = v
        return bs, mu

    bs, mu = gso(b)
    k = 1
    guard = 0
    while k < n:
        guard += 1
        if guard > 10000:
            break
        for j in range(k - 1, -1, -1):
            q = round(mu[k, j])
            if q:
                b[:, k] -= q * b[:, j]
                t[:, k] -= q * t[:, j]
                bs, mu = gso(b)
        if bs[:, k] @ bs[:, k] >= (delta - mu[k, k - 1] ** 2) * (bs[:, k - 1] @ bs[:, k - 1]):
            k += 1
        else:
            b[:, [k, k - 1]] = b[:, [k - 1, k]]
            t[:, [k, k - 1]] = t[:, [k - 1, k]]
            bs, mu = gso(b)
            k = max(k - 1, 1)
    return b, t


def ellipsoid_blocks(lin: np.ndarray, center: np.ndarray, bound: float = 1.0):
    """Integer w with |lin @ (w - center)|^2 <= bound (Fincke-Pohst after
    LLL), yielded as int64 arrays, one per outermost layer."""
    reduced, t = lll_reduce(lin)
    q, r = np.linalg.qr(reduced)
    target = q.T @ (lin @ center)
    r22, r11, r00 = r[2, 2], r[1, 1], r[0, 0]

    def span(num_center, diag, remaining):
        if remaining < 0:
            return range(0)
        w = math.sqrt(remaining) / abs(diag)
        c = num_center / diag
        return range(math.ceil(c - w - 1e-9), math.floor(c + w + 1e-9) + 1)

    for u2 in span(target[2], r22, bound):
        e2 = (r22 * u2 - target[2]) ** 2
        c1 = target[1] - r[1, 2] * u2
        rows = []
        for u1 in span(c1, r11, bound - e2):
            e1 = (r11 * u1 - c1) ** 2
            c0 = target[0] - r[0, 1] * u1 - r[0, 2] * u2
            u0 = span(c0, r00, bound - e2 - e1)
            if len(u0):
                u = np.empty((len(u0), 3), dtype=np.int64)
                u[:, 0] = np.arange(u0.start, u0.stop)
                u[:, 1], u[:, 2] = u1, u2
                rows.append(u)
        if rows:
            yield np.concatenate(rows) @ t.T


def ellipsoid_points(lin: np.ndarray, center: np.ndarray, bound: float = 1.0) -> list:
    """:func:`ellipsoid_blocks` collected into a list of tuples."""
    return [tuple(int(a) for a in w) for block in ellipsoid_blocks(lin, center, bound) for w in block]
