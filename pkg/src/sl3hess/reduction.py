"""Exact reduction decisions.

For an operator M with irreducible characteristic polynomial the
MD-characteristic is Delta(w) = |F(w)| with F(w) = det(w, Mw, M^2 w), and
``(M|w)`` has Hessenberg complexity Delta(w).  A perfect Hessenberg matrix is
reduced exactly when its complexity equals the minimum of Delta over all
nonzero integer vectors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import (
    NotHessenberg,
    NotUnimodular,
    ReduciblePolynomial,
    RegionTooLarge,
    SpectrumMismatch,
)
from .exact import CUBIC_MONOMIALS, Mat3, charpoly_coeffs, cubic_form, has_unit_root
from .hessenberg import complexity, reduce_to_perfect, type_of
from .klein_voronoi import (
    DEFAULT_CELL_BUDGET,
    DEFAULT_PADDING,
    DEFAULT_SAMPLES,
    candidate_array,
    spectral_basis,
)
from .spectra import SpectrumClass, classify_coeffs

OBSTRUCTION_MODULI = (2, 3, 4, 5, 7, 8, 9)
KLEIN_VORONOI = "KleinVoronoiMinimum"


def mod_q_certificate(q: int) -> str:
    return f"ModQObstruction({q})"


@dataclass(frozen=True)
class ReductionVerdict:
    verdict: str  # Reduced | Nonreduced | ProbablyReduced | Unknown
    mu: Optional[int] = None
    witnesses: tuple = ()
    certificate: Optional[str] = None
    bound: Optional[int] = None

    @property
    def reduced(self) -> bool:
        return self.verdict == "Reduced"

    def to_json(self) -> dict:
        out = {
            "verdict": self.verdict,
            "mu": self.mu,
            "witnesses": [list(w) for w in self.witnesses],
            "certificate": self.certificate,
        }
        if self.bound is not None:
            out["bound"] = self.bound
        return out


@dataclass(frozen=True)
class ReducedSet:
    mu: int
    matrices: tuple = field(default_factory=tuple)

    def __contains__(self, m):
        return m in self.matrices

    def __len__(self):
        return len(self.matrices)

    def to_json(self) -> dict:
        return {"mu": self.mu, "matrices": [m.text() for m in self.matrices]}


def _require_irreducible(m: Mat3) -> tuple:
    b = charpoly_coeffs(m)
    if has_unit_root(*b):
        raise ReduciblePolynomial(f"{m.text()} has a root at +-1")
    return b


def _require_nrs(m: Mat3) -> None:
    b = _require_irreducible(m)
    cls = classify_coeffs(*b)
    if cls is not SpectrumClass.NRS:
        raise SpectrumMismatch(f"{m.text()} is {cls.value}, not NRS")


# -- box search -----------------------------------------------------------------


def _canonical_sign(w) -> tuple:
    for a in w:
        if a:
            return tuple(w) if a > 0 else tuple(-b for b in w)
    return tuple(w)


def _half_space_slabs(bound: int, chunk: int):
    """Integer points of the box up to sign: (x-range, y-range, z-range) slabs."""
    yield (range(0, 1), range(0, 1), range(1, bound + 1))
    yield (range(0, 1), range(1, bound + 1), range(-bound, bound + 1))
    for x0 in range(1, bound + 1, chunk):
        yield (range(x0, min(x0 + chunk, bound + 1)), range(-bound, bound + 1), range(-bound, bound + 1))


def _eval_grid(coeffs, xs, ys, zs, dtype):
    x = np.asarray(xs, dtype=dtype)[:, None, None]
    y = np.asarray(ys, dtype=dtype)[None, :, None]
    z = np.asarray(zs, dtype=dtype)[None, None, :]
    px = [np.ones_like(x), x, x * x, x * x * x]
    py = [np.ones_like(y), y, y * y, y * y * y]
    pz = [np.ones_like(z), z, z * z, z * z * z]
    total = np.zeros((len(xs), len(ys), len(zs)), dtype=dtype)
    for c, (i, j, k) in zip(coeffs, CUBIC_MONOMIALS):
        if c:
            total = total + c * (px[i] * py[j] * pz[k])
    return total


def box_search_min(m: Mat3, bound: int, *, early_exit: bool = True) -> tuple[int, list]:
    """Minimum of Delta over nonzero w with |w|_inf <= bound, and its
    primitive minimisers (one per sign pair, first nonzero entry positive).

    With ``early_exit`` the scan stops after the slab where the value 1 first
    appears, so the witness list is then not exhaustive.
    """
    if bound < 1:
        raise ValueError("bound must be at least 1")
    form = cubic_form(m)
    safe = form.max_abs_bound(bound) < 2 ** 62
    dtype = np.int64 if safe else object
    side = 2 * bound + 1
    chunk = max(1, 2_000_000 // (side * side))
    best = None
    witnesses: list = []
    for xs, ys, zs in _half_space_slabs(bound, chunk):
        vals = np.abs(_eval_grid(form.coeffs, xs, ys, zs, dtype))
        nz = vals[vals != 0]
        if nz.size == 0:
            continue
        low = int(nz.min())
        if best is not None and low > best:
            continue
        if best is None or low < best:
            best, witnesses = low, []
        for i, j, k in zip(*np.nonzero(vals == low)):
            witnesses.append((xs[i], ys[j], zs[k]))
        if early_exit and best == 1:
            break
    if best is None:
        raise ReduciblePolynomial(f"Delta vanishes on the whole box for {m.text()}")
    prim = [w for w in witnesses if np.gcd.reduce(np.abs(w)) == 1]
    return best, sorted(_canonical_sign(w) for w in prim)


# -- global minimum over the candidate region ----------------------------------


def min_md_over_candidates(
    m: Mat3,
    p=(1, 0, 0),
    *,
    samples: int = DEFAULT_SAMPLES,
    padding: float = DEFAULT_PADDING,
    budget: int = DEFAULT_CELL_BUDGET,
) -> tuple[int, list]:
    """Global minimum of Delta and every candidate attaining it.

    Minimisers of Delta lie on the sail, and the candidate regions cover one
    period of the sail, so the minimum over candidates is the global one.
    """
    _require_nrs(m)
    basis = spectral_basis(m)
    form = cubic_form(m)
    cands = candidate_array(m, p, samples=samples, padding=padding, budget=budget, basis=basis)
    mu, at_min = form.min_abs_rows(cands)
    if mu == 0:
        raise ReduciblePolynomial(f"Delta vanishes at a candidate of {m.text()}")
    return mu, [tuple(int(a) for a in w) for w in cands[at_min]]


# -- modular certificates ---------------------------------------------------------


@lru_cache(maxsize=4096)
def _residues(coeffs: tuple, q: int) -> frozenset:
    r = range(q)
    vals = _eval_grid(tuple(c % q for c in coeffs), r, r, r, np.int64) % q
    return frozenset(int(v) for v in np.unique(vals))


def mod_q_obstruction(m: Mat3, c: int, q: int, *, form=None) -> bool:
    """True when no integer w has F(w) = +-c, judged from F modulo q."""
    if q < 2:
        raise ValueError("q must be at least 2")
    seen = _residues((form or cubic_form(m)).coeffs, q)
    return c % q not in seen and (-c) % q not in seen


def find_obstruction(m: Mat3, ceiling: int, moduli=OBSTRUCTION_MODULI, *, form=None) -> Optional[int]:
    """A modulus q ruling out every value 1..ceiling-1 of Delta, if one exists."""
    form = form or cubic_form(m)
    for q in moduli:
        if all(mod_q_obstruction(m, c, q, form=form) for c in range(1, ceiling)):
            return q
    return None


# -- verdicts ------------------------------------------------------------------------


def is_sigma_reduced(
    m: Mat3,
    *,
    box_bound: int = 1000,
    samples: int = DEFAULT_SAMPLES,
    padding: float = DEFAULT_PADDING,
    budget: int = DEFAULT_CELL_BUDGET,
) -> ReductionVerdict:
    t, perfect = type_of(m)
    if not perfect:
        raise NotHessenberg(f"{m.text()} is Hessenberg but not perfect")
    if m.det() != 1:
        raise NotUnimodular(f"{m.text()} has determinant {m.det()}")
    b = _require_irreducible(m)
    sigma = complexity(t)
    if sigma == 1:
        # Delta >= 1 for irreducible M, so complexity 1 is always least
        return ReductionVerdict("Reduced", 1, ((1, 0, 0),), KLEIN_VORONOI)
    q = find_obstruction(m, sigma)
    if q is not None:
        return ReductionVerdict("Reduced", sigma, ((1, 0, 0),), mod_q_certificate(q))
    if classify_coeffs(*b) is SpectrumClass.NRS:
        try:
            mu, argmins = min_md_over_candidates(m, samples=samples, padding=padding, budget=budget)
        except RegionTooLarge:
            return ReductionVerdict("Unknown", bound=budget)
        if mu == sigma:
            return ReductionVerdict("Reduced", mu, tuple(argmins), KLEIN_VORONOI)
        return ReductionVerdict("Nonreduced", mu, tuple(argmins))
    mu, wit = box_search_min(m, box_bound)
    if mu < sigma:
        return ReductionVerdict("Nonreduced", mu, tuple(wit), bound=box_bound)
    return ReductionVerdict("ProbablyReduced", mu, tuple(wit), bound=box_bound)


def sigma_reduced_set(m: Mat3, **kwargs) -> ReducedSet:
    mu, argmins = min_md_over_candidates(m, **kwargs)
    found = {reduce_to_perfect(m, w) for w in argmins}
    for h in found:
        assert complexity(type_of(h)[0]) == mu
    return ReducedSet(mu, tuple(sorted(found, key=lambda h: h.text())))


def shared_reduced(m1: Mat3, m2: Mat3, **kwargs) -> list:
    """Reduced matrices common to both classes; empty when not conjugate."""
    if charpoly_coeffs(m1) != charpoly_coeffs(m2):
        return []
    s1 = sigma_reduced_set(m1, **kwargs)
    s2 = sigma_reduced_set(m2, **kwargs)
    return sorted(set(s1.matrices) & set(s2.matrices), key=lambda h: h.text())


def integer_conjugate(m1: Mat3, m2: Mat3, **kwargs) -> bool:
    if charpoly_coeffs(m1) != charpoly_coeffs(m2):
        return False
    return bool(shared_reduced(m1, m2, **kwargs))


# -- roots ---------------------------------------------------------------------------


def detect_power_root(m: Mat3, k: int) -> Optional[Mat3]:
    """An integer B with B^k = M, or None.

    Such a B commutes with M, hence is c0 + c1 M + c2 M^2 where the
    polynomial sends each eigenvalue of M to a k-th root of it.
    """
    if k not in (2, 3):
        raise ValueError("k must be 2 or 3")
    _require_nrs(m)
    basis = spectral_basis(m)
    r, c = basis.r, basis.c
    if k == 2:
        real_roots = [r ** 0.5, -(r ** 0.5)] if r > 0 else []
    else:
        real_roots = [np.sign(r) * abs(r) ** (1 / 3)]
    complex_roots = [c ** (1 / k) * np.exp(2j * np.pi * j / k) for j in range(k)]
    lam = np.array([r, c, np.conj(c)])
    vander = np.stack([np.ones(3), lam, lam * lam], axis=1)
    a = np.array(m.rows, dtype=float)
    powers = [np.eye(3), a, a @ a]
    for rr, cc in itertools.product(real_roots, complex_roots):
        coef = np.linalg.solve(vander, np.array([rr, cc, np.conj(cc)]))
        approx = sum(coef[i].real * powers[i] for i in range(3))
        if not np.all(np.isfinite(approx)) or np.abs(approx).max() > 2 ** 52:
            continue
        cand = Mat3(np.rint(approx).astype(np.int64).tolist())
        if cand ** k == m:
            return cand
    return None

