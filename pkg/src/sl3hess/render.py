"""Deterministic JSON, CSV and SVG renderings of grids, sails and census reports."""

from __future__ import annotations

import csv
import io
import json

from .errors import UnsupportedFormat
from .klein_voronoi import FactorSail
from .survey import CellClass, FamilyGrid, SurveyReport, expected_count

CELL_COLORS = {
    CellClass.REDUCIBLE: "#000000",
    CellClass.DEGENERATE: "#000000",
    CellClass.NRS_NONREDUCED: "#555555",
    CellClass.RS_NONREDUCED: "#555555",
    CellClass.NRS_REDUCED_POWER: "#999999",
    CellClass.NRS_REDUCED: "#ffffff",
    CellClass.RS_REDUCED_CERTIFIED: "#ffffff",
    CellClass.RS_PROBABLY_REDUCED: "#eeeeee",
    CellClass.UNRESOLVED: "#dddddd",
}
BOUNDARY_COLOR = "#aaaaaa"
CELL = 10


def render(obj, fmt: str) -> bytes:
    table = {
        FamilyGrid: {"json": _json, "csv": _grid_csv, "svg": _grid_svg},
        FactorSail: {"json": _json, "csv": _sail_csv, "svg": _sail_svg},
    }
    if isinstance(obj, list) and all(isinstance(r, SurveyReport) for r in obj):
        handlers = {"json": lambda rs: _dump([r.to_json() for r in rs]), "csv": _census_csv}
    else:
        handlers = table.get(type(obj))
        if handlers is None:
            raise UnsupportedFormat(f"cannot render {type(obj).__name__}")
    if fmt not in handlers:
        raise UnsupportedFormat(f"format {fmt!r} is not available for {type(obj).__name__}")
    return handlers[fmt](obj)


def _dump(data) -> bytes:
    return (json.dumps(data, indent=1, sort_keys=True) + "\n").encode()


def _json(obj) -> bytes:
    return _dump(obj.to_json())


def _csv(header, rows) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue().encode()


def _grid_csv(grid: FamilyGrid) -> bytes:
    rows = []
    for key in sorted(grid.cells):
        c = grid.cells[key]
        rows.append([c.m, c.n, c.cls.value, c.sigma, c.delta, "" if c.mu is None else c.mu, c.certificate or ""])
    return _csv(["m", "n", "class", "sigma", "delta", "mu", "certificate"], rows)


def _grid_svg(grid: FamilyGrid) -> bytes:
    w = grid.window
    width = (w.m_hi - w.m_lo + 1) * CELL
    height = (w.n_hi - w.n_lo + 1) * CELL
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    ]

    def origin(m, n):
        return (m - w.m_lo) * CELL, (w.n_hi - n) * CELL

    # rows from the top (largest n) down, cells left to right
    for n in range(w.n_hi, w.n_lo - 1, -1):
        for m in range(w.m_lo, w.m_hi + 1):
            c = grid.cells[(m, n)]
            x, y = origin(m, n)
            out.append(
                f'<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{CELL_COLORS[c.cls]}" '
                f'stroke="#cccccc" stroke-width="0.5"/>'
            )
    segs = []
    for (m, n), c in sorted(grid.cells.items()):
        for dm, dn in ((1, 0), (0, 1)):
            other = grid.cells.get((m + dm, n + dn))
            if other is None or (c.delta < 0) == (other.delta < 0):
                continue
            x, y = origin(m, n)
            if dm:
                segs.append(f"M{x + CELL} {y}L{x + CELL} {y + CELL}")
            else:
                segs.append(f"M{x} {y}L{x + CELL} {y}")
    if segs:
        out.append(f'<path d="{"".join(segs)}" fill="none" stroke="{BOUNDARY_COLOR}" stroke-width="2"/>')
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode()


def _sail_csv(sail: FactorSail) -> bytes:
    rows = []
    for name, line in sail.components():
        for p in line:
            rows.append([name, *p.source, repr(p.x), repr(p.rho), int(sail.certified[p.source])])
    return _csv(["component", "w1", "w2", "w3", "x", "rho", "certified"], rows)


def _sail_svg(sail: FactorSail, size: int = 400) -> bytes:
    pts = [(p.x, p.rho) for _, line in sail.components() for p in line]
    xmax = max(x for x, _ in pts) * 1.05
    rmax = max(r for _, r in pts) * 1.05
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">']

    def xy(x, r):
        return f"{x / xmax * size:.4f},{size - r / rmax * size:.4f}"

    for name, line in sail.components():
        color = "#000000" if name == "positive" else "#555555"
        path = " ".join(xy(p.x, p.rho) for p in line)
        out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1"/>')
        for p in line:
            cx, cy = xy(p.x, p.rho).split(",")
            fill = color if sail.certified[p.source] else "#ffffff"
            out.append(f'<circle cx="{cx}" cy="{cy}" r="3" fill="{fill}" stroke="{color}"/>')
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode()


def _census_csv(reports: list) -> bytes:
    rows = []
    for r in reports:
        pub = expected_count(r.type)
        rows.append([str(r.type), r.sigma, r.count, r.window, "" if pub is None else pub, int(r.stabilized)])
    return _csv(["type", "sigma", "count", "window", "expected", "stabilized"], rows)
