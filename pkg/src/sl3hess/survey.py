"""Family grid scans, ray scans, the nonreduced census and ray diagnostics."""

from __future__ import annotations

import enum
import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import BudgetExceeded, DegenerateType, Sl3Error
from .exact import BiPoly, Mat3, charpoly_coeffs, cubic_form, discriminant_from_coeffs
from .hessenberg import HessenbergType, RaySpec, complete_type, complexity, family_matrix, ray_matrix
from .klein_voronoi import spectral_basis
from .reduction import detect_power_root, is_sigma_reduced
from .spectra import SpectrumClass, classify_coeffs, symbolic_family

CENSUS_TABLE = (
    ("0,1|0,0,1", 1, 0),
    ("0,1|1,0,2", 2, 12),
    ("0,1|1,1,2", 2, 12),
    ("0,1|1,0,3", 3, 6),
    ("0,1|1,1,3", 3, 10),
    ("0,1|1,2,3", 3, 10),
    ("0,1|2,0,3", 3, 14),
    ("0,1|2,1,3", 3, 10),
    ("0,1|2,2,3", 3, 10),
    ("1,2|0,0,1", 4, 94),
    ("0,1|1,0,4", 4, 6),
    ("0,1|1,1,4", 4, 8),
    ("0,1|1,2,4", 4, 10),
    ("0,1|1,3,4", 4, 8),
    ("0,1|3,0,4", 4, 10),
    ("0,1|3,1,4", 4, 12),
    ("0,1|3,2,4", 4, 8),
    ("0,1|3,3,4", 4, 8),
)
"""(type, complexity, expected nonreduced count) for all complexities below 5."""


# -- configuration ---------------------------------------------------------------


@dataclass(frozen=True)
class Config:
    box_bound: int = 100
    orbit_samples: int = 256
    padding: float = 1e-6
    cell_budget: int = 10 ** 9
    cache_dir: Optional[str] = None
    workers: int = 1

    def fingerprint(self) -> str:
        """Hash of the settings that can change a verdict."""
        key = f"{self.box_bound}|{self.orbit_samples}|{self.padding!r}|{self.cell_budget}"
        return hashlib.sha256(key.encode()).hexdigest()[:16]

    def replace(self, **changes) -> "Config":
        data = asdict(self)
        data.update({k: v for k, v in changes.items() if v is not None})
        return Config(**data)

    def reduction_kwargs(self) -> dict:
        return {
            "box_bound": self.box_bound,
            "samples": self.orbit_samples,
            "padding": self.padding,
            "budget": self.cell_budget,
        }


def load_config(path) -> Config:
    """Read ``key = value`` lines; ``#`` starts a comment."""
    types = {f.name: f.type for f in fields(Config)}
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (s.strip() for s in line.partition("="))
        if not sep or key not in types:
            raise ValueError(f"{path}:{lineno}: cannot parse {raw!r}")
        if key == "cache_dir":
            values[key] = value or None
        elif key == "padding":
            values[key] = float(value)
        else:
            values[key] = int(float(value)) if "e" in value.lower() else int(value)
    return Config(**values)


# -- cells ---------------------------------------------------------------------------


class CellClass(str, enum.Enum):
    REDUCIBLE = "ReduciblePoly"
    NRS_REDUCED = "NrsReduced"
    NRS_REDUCED_POWER = "NrsReducedPower"
    NRS_NONREDUCED = "NrsNonreduced"
    RS_NONREDUCED = "RsNonreduced"
    RS_PROBABLY_REDUCED = "RsProbablyReduced"
    RS_REDUCED_CERTIFIED = "RsReducedCertified"
    DEGENERATE = "Degenerate"
    UNRESOLVED = "Unresolved"


REDUCED_CLASSES = {CellClass.NRS_REDUCED, CellClass.NRS_REDUCED_POWER, CellClass.RS_REDUCED_CERTIFIED}
NONREDUCED_CLASSES = {CellClass.NRS_NONREDUCED, CellClass.RS_NONREDUCED}


@dataclass(frozen=True)
class Cell:
    m: int
    n: int
    cls: CellClass
    sigma: int
    delta: int
    mu: Optional[int] = None
    certificate: Optional[str] = None
    witness: Optional[tuple] = None
    error: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "class": self.cls.value,
            "sigma": self.sigma,
            "delta": self.delta,
            "mu": self.mu,
            "certificate": self.certificate,
            "witness": list(self.witness) if self.witness else None,
            "error": self.error,
        }

    @classmethod
    def from_json(cls, d: dict) -> "Cell":
        return cls(
            d["m"], d["n"], CellClass(d["class"]), d["sigma"], d["delta"], d["mu"],
            d["certificate"], tuple(d["witness"]) if d["witness"] else None, d["error"],
        )


class CellCache:
    """One JSON file per evaluated matrix; files are never rewritten."""

    def __init__(self, directory, cfg: Config):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.salt = cfg.fingerprint()

    def path(self, matrix: Mat3, mode: str) -> Path:
        key = hashlib.sha256(f"{matrix.text()}|{mode}|{self.salt}".encode()).hexdigest()
        return self.dir / f"{key[:32]}.json"

    def get(self, matrix: Mat3, mode: str) -> Optional[dict]:
        p = self.path(matrix, mode)
        if p.exists():
            return json.loads(p.read_text())
        return None

    def put(self, matrix: Mat3, mode: str, payload: dict) -> None:
        p = self.path(matrix, mode)
        if not p.exists():
            tmp = p.with_suffix(".tmp")
            tmp.write_text(json.dumps(payload, sort_keys=True))
            tmp.replace(p)


def evaluate_cell(
    t: HessenbergType, v, m: int, n: int, cfg: Config, *, powers: bool = True, rs: bool = True
) -> Cell:
    """Classify one family member.

    With ``rs=False`` RS cells are not decided and come back Unresolved;
    the census only needs NRS verdicts.
    """
    h = family_matrix(t, v, m, n)
    sigma = complexity(t)
    b = charpoly_coeffs(h)
    delta = discriminant_from_coeffs(*b)
    spec = classify_coeffs(*b)
    if spec is SpectrumClass.REDUCIBLE:
        return Cell(m, n, CellClass.REDUCIBLE, sigma, delta)
    if spec is SpectrumClass.DEGENERATE:
        return Cell(m, n, CellClass.DEGENERATE, sigma, delta)
    if spec is SpectrumClass.RS and not rs:
        return Cell(m, n, CellClass.UNRESOLVED, sigma, delta)
    try:
        verdict = is_sigma_reduced(h, **cfg.reduction_kwargs())
    except Sl3Error as exc:
        return Cell(m, n, CellClass.UNRESOLVED, sigma, delta, error=str(exc))
    witness = verdict.witnesses[0] if verdict.witnesses else None
    nrs = spec is SpectrumClass.NRS
    if verdict.verdict == "Nonreduced":
        cls = CellClass.NRS_NONREDUCED if nrs else CellClass.RS_NONREDUCED
    elif verdict.verdict == "Reduced":
        if nrs:
            cls = CellClass.NRS_REDUCED
            if powers and any(detect_power_root(h, k) is not None for k in (2, 3)):
                cls = CellClass.NRS_REDUCED_POWER
        else:
            cls = CellClass.RS_REDUCED_CERTIFIED
    elif verdict.verdict == "ProbablyReduced":
        cls = CellClass.RS_PROBABLY_REDUCED
    else:
        cls = CellClass.UNRESOLVED
    return Cell(m, n, cls, sigma, delta, verdict.mu, verdict.certificate, witness)


def classify_cell(t: HessenbergType, v, m: int, n: int, cfg: Config = Config()) -> CellClass:
    return evaluate_cell(t, v, m, n, cfg).cls


def _evaluate_cached(t, v, m, n, cfg, cache, powers, rs) -> Cell:
    if cache is None:
        return evaluate_cell(t, v, m, n, cfg, powers=powers, rs=rs)
    h = family_matrix(t, v, m, n)
    mode = f"p{int(powers)}r{int(rs)}"
    hit = cache.get(h, mode)
    if hit is not None:
        d = dict(hit, m=m, n=n)
        return Cell.from_json(d)
    cell = evaluate_cell(t, v, m, n, cfg, powers=powers, rs=rs)
    cache.put(h, mode, cell.to_json())
    return cell


def _evaluate_batch(args) -> list:
    t, v, coords, cfg, powers, rs = args
    cache = CellCache(cfg.cache_dir, cfg) if cfg.cache_dir else None
    return [_evaluate_cached(t, v, m, n, cfg, cache, powers, rs) for m, n in coords]


def evaluate_cells(t, v, coords, cfg: Config, *, powers=True, rs=True) -> dict:
    """Evaluate cells, in parallel when ``cfg.workers > 1``; the result does
    not depend on the schedule."""
    coords = sorted(coords)
    if cfg.workers <= 1 or len(coords) < 2 * cfg.workers:
        cells = _evaluate_batch((t, v, coords, cfg, powers, rs))
    else:
        k = cfg.workers * 4
        batches = [(t, v, coords[i::k], cfg, powers, rs) for i in range(k)]
        with ProcessPoolExecutor(cfg.workers) as pool:
            cells = [c for part in pool.map(_evaluate_batch, batches) for c in part]
    return {(c.m, c.n): c for c in sorted(cells, key=lambda c: (c.m, c.n))}


# -- grids -----------------------------------------------------------------------------


@dataclass(frozen=True)
class Window:
    m_lo: int
    m_hi: int
    n_lo: int
    n_hi: int

    def __post_init__(self):
        if self.m_lo > self.m_hi or self.n_lo > self.n_hi:
            raise ValueError("empty window")

    @classmethod
    def square(cls, half: int) -> "Window":
        return cls(-half, half, -half, half)

    def coords(self) -> list:
        return [(m, n) for m in range(self.m_lo, self.m_hi + 1) for n in range(self.n_lo, self.n_hi + 1)]

    @property
    def area(self) -> int:
        return (self.m_hi - self.m_lo + 1) * (self.n_hi - self.n_lo + 1)


@dataclass
class FamilyGrid:
    type: HessenbergType
    v: tuple
    window: Window
    cells: dict

    def count(self, cls: CellClass) -> int:
        return sum(1 for c in self.cells.values() if c.cls is cls)

    def nonreduced(self) -> list:
        return [k for k, c in self.cells.items() if c.cls is CellClass.NRS_NONREDUCED]

    def to_json(self) -> dict:
        w = self.window
        return {
            "type": self.type.text(),
            "v": list(self.v),
            "window": {"m": [w.m_lo, w.m_hi], "n": [w.n_lo, w.n_hi]},
            "cells": [self.cells[k].to_json() for k in sorted(self.cells)],
        }


def scan_family(
    t: HessenbergType, v, window: Window, cfg: Config = Config(), *, powers: bool = True, rs: bool = True
) -> FamilyGrid:
    v = tuple(v) if v is not None else complete_type(t)
    cells = evaluate_cells(t, v, window.coords(), cfg, powers=powers, rs=rs)
    return FamilyGrid(t, v, window, cells)


# -- census ------------------------------------------------------------------------------


@dataclass
class SurveyReport:
    type: HessenbergType
    v: tuple
    sigma: int
    count: Optional[int]
    window: Optional[int]
    stabilized: bool
    history: list = field(default_factory=list)
    seconds: float = 0.0
    nonreduced: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "type": self.type.text(),
            "v": list(self.v),
            "sigma": self.sigma,
            "count": self.count,
            "window": self.window,
            "stabilized": self.stabilized,
            "history": [list(h) for h in self.history],
            "nonreduced": [list(c) for c in self.nonreduced],
            "config": self.config,
        }


def count_nonreduced_stabilized(
    t: HessenbergType,
    v=None,
    cfg: Config = Config(),
    *,
    start: int = 16,
    max_half: int = 512,
    deadline: Optional[float] = None,
) -> SurveyReport:
    """Count NRS nonreduced cells in the square [-h, h]^2 for h = start,
    2*start, ... until the count repeats over two consecutive doublings.

    Raises BudgetExceeded, carrying the partial report, when ``max_half`` or
    the wall-clock ``deadline`` (a ``time.monotonic`` value) is reached first.
    """
    v = tuple(v) if v is not None else complete_type(t)
    began = time.monotonic()
    report = SurveyReport(t, v, complexity(t), None, None, False, config=asdict(cfg))
    known: dict = {}
    half = start
    while True:
        todo = [c for c in Window.square(half).coords() if c not in known]
        known.update(evaluate_cells(t, v, todo, cfg, powers=False, rs=False))
        bad = sorted(k for k, c in known.items() if c.cls is CellClass.NRS_NONREDUCED and max(map(abs, k)) <= half)
        report.history.append((half, len(bad)))
        report.count, report.window, report.nonreduced = len(bad), half, bad
        report.seconds = time.monotonic() - began
        counts = [c for _, c in report.history[-3:]]
        if len(counts) == 3 and len(set(counts)) == 1:
            report.stabilized = True
            return report
        if half * 2 > max_half or (deadline is not None and time.monotonic() > deadline):
            raise BudgetExceeded(f"{t} not stable by window {half}", partial=report)
        half *= 2


def census(max_complexity: int = 4, cfg: Config = Config(), *, deadline=None, **kwargs) -> list:
    """Stabilised counts for the tabulated types up to ``max_complexity``;
    unstable types are returned as their partial reports."""
    out = []
    for text, sigma, _ in CENSUS_TABLE:
        if sigma > max_complexity:
            continue
        try:
            out.append(count_nonreduced_stabilized(HessenbergType.parse(text), None, cfg, deadline=deadline, **kwargs))
        except BudgetExceeded as exc:
            out.append(exc.partial)
    return out


def expected_count(t: HessenbergType) -> Optional[int]:
    for text, _, count in CENSUS_TABLE:
        if HessenbergType.parse(text) == t:
            return count
    return None


# -- rays -----------------------------------------------------------------------------------


def _ray_polys(r: RaySpec) -> tuple:
    """b1, b2, b3 of the ray matrices as univariate coefficient lists in t."""
    s = BiPoly.m()
    (m0, n0), (dm, dn) = r.base, r.direction
    rows = symbolic_family(r.type, r.v)
    b = charpoly_coeffs(rows)
    return tuple(bi(m0 + dm * s, n0 + dn * s) for bi in b)


def _nonneg_integer_roots(coeffs: list) -> set:
    c = [int(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    if not c:
        return None  # identically zero
    bound = 1 + math.ceil(max((abs(x) for x in c[:-1]), default=0) / abs(c[-1]))
    return {t for t in range(bound + 1) if sum(a * t ** i for i, a in enumerate(c)) == 0}


def is_nrs_ray(r: RaySpec) -> bool:
    """Exactly decide whether every point of the ray (t >= 0) is NRS."""
    b1, b2, b3 = _ray_polys(r)
    delta = discriminant_from_coeffs(b1, b2, b3).univariate()
    for unit in (b1 - b2 + b3 - 1, b1 + b2 + b3 + 1):
        roots = _nonneg_integer_roots(unit.univariate())
        if roots is None or roots:
            return False
    c = [int(x) for x in delta]
    while c and c[-1] == 0:
        c.pop()
    if not c or c[-1] > 0:
        return False
    bound = 1 + math.ceil(max((abs(x) for x in c[:-1]), default=0) / abs(c[-1]))
    return all(sum(a * t ** i for i, a in enumerate(c)) < 0 for t in range(bound + 1))


@dataclass
class RayScan:
    ray: RaySpec
    verdicts: list
    tail_reduced: int

    def nonreduced(self) -> list:
        return [t for t, c in self.verdicts if c in NONREDUCED_CLASSES]

    def to_json(self) -> dict:
        return {
            "type": self.ray.type.text(),
            "v": list(self.ray.v),
            "base": list(self.ray.base),
            "index": self.ray.index,
            "verdicts": [[t, c.value] for t, c in self.verdicts],
            "tail_reduced": self.tail_reduced,
        }


def scan_ray(r: RaySpec, t_max: int, cfg: Config = Config(), *, powers: bool = False) -> RayScan:
    coords = {r.point(t): t for t in range(t_max + 1)}
    cells = evaluate_cells(r.type, r.v, list(coords), cfg, powers=powers)
    verdicts = sorted((coords[k], c.cls) for k, c in cells.items())
    tail = 0
    for _, c in reversed(verdicts):
        if c not in REDUCED_CLASSES:
            break
        tail += 1
    return RayScan(r, verdicts, tail)


@dataclass
class RayDiagnostics:
    point: tuple
    expected_slope: int
    samples: list
    affine: bool
    slope_ok: bool
    ratios: list
    exponent: Optional[float]
    exponent_ok: Optional[bool]

    def to_json(self) -> dict:
        return {
            "point": list(self.point),
            "expected_slope": self.expected_slope,
            "samples": [list(s) for s in self.samples],
            "affine": self.affine,
            "slope_ok": self.slope_ok,
            "axis_ratios": [list(r) for r in self.ratios],
            "exponent": self.exponent,
            "exponent_ok": self.exponent_ok,
        }


def axis_ratio(m: Mat3) -> float:
    """Major over minor axis of the orbit ellipses of M."""
    b = spectral_basis(m)
    a, c = np.linalg.norm(b.g2), np.linalg.norm(b.g3)
    return float(max(a, c) / min(a, c))


def ray_diagnostics(
    r: RaySpec,
    t_values=(1000, 3000, 10000),
    point=(1, 1, 0),
    *,
    slope_ts=(0, 1, 7),
    tolerance: float = 0.05,
) -> RayDiagnostics:
    """Exact slope check of F(point) along an index-1 ray and a log-log fit
    of the orbit axis ratio against t.

    F is the signed form det(w, Mw, M^2 w); Delta = |F| inherits the slope up
    to sign wherever F keeps its sign.
    """
    t = r.type
    if t.a21 * t.a32 == 0:
        raise DegenerateType(f"{t} has a21*a32 = 0")
    if r.index != 1:
        raise ValueError("slope diagnostics apply to index-1 rays")
    x, y, z = point
    if z != 0:
        raise ValueError("point must have third coordinate 0")
    expected = (t.a21 * x - t.a11 * y) * t.a32 ** 2 * y * y
    samples = [(s, cubic_form(ray_matrix(r, s))(point)) for s in slope_ts]
    (t0, f0), (t1, f1), (t2, f2) = samples[:3]
    affine = (f1 - f0) * (t2 - t1) == (f2 - f1) * (t1 - t0)
    slope_ok = affine and (f1 - f0) == expected * (t1 - t0)
    ratios, exponent, exponent_ok = [], None, None
    if t_values:
        ratios = [(s, axis_ratio(ray_matrix(r, s))) for s in t_values]
        lt = np.log([s for s, _ in ratios])
        lr = np.log([q for _, q in ratios])
        exponent = float(np.polyfit(lt, lr, 1)[0])
        exponent_ok = abs(exponent - 0.5) <= tolerance
    return RayDiagnostics(tuple(point), expected, samples, affine, slope_ok, ratios, exponent, exponent_ok)
