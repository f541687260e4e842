"""PNG figures of grids, sails and census results (matplotlib, Agg backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import to_rgb  # noqa: E402

from .render import BOUNDARY_COLOR, CELL_COLORS  # noqa: E402
from .survey import expected_count  # noqa: E402


def grid_figure(grid, path) -> Path:
    w = grid.window
    img = np.ones((w.n_hi - w.n_lo + 1, w.m_hi - w.m_lo + 1, 3))
    for (m, n), c in grid.cells.items():
        img[w.n_hi - n, m - w.m_lo] = to_rgb(CELL_COLORS[c.cls])
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.imshow(img, extent=(w.m_lo - 0.5, w.m_hi + 0.5, w.n_lo - 0.5, w.n_hi + 0.5), interpolation="nearest")
    nrs = np.zeros(img.shape[:2])
    for (m, n), c in grid.cells.items():
        nrs[n - w.n_lo, m - w.m_lo] = 1.0 if c.delta < 0 else 0.0
    ms = np.arange(w.m_lo, w.m_hi + 1)
    ns = np.arange(w.n_lo, w.n_hi + 1)
    if 0 < nrs.sum() < nrs.size:
        ax.contour(ms, ns, nrs, levels=[0.5], colors=[BOUNDARY_COLOR], linewidths=1.5)
    ax.set_xlabel("m")
    ax.set_ylabel("n")
    ax.set_title(f"<{grid.type.text()}>, v = {tuple(grid.v)}")
    return _save(fig, path)


def sail_figure(sail, path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    for (name, line), style in zip(sail.components(), ("k-o", "--s")):
        xs = [p.x for p in line]
        rs = [p.rho for p in line]
        ax.plot(xs, rs, style, label=f"{name} x", markersize=4)
        for p in line:
            if sail.certified[p.source]:
                ax.annotate(str(p.source), (p.x, p.rho), fontsize=6)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("|x|")
    ax.set_ylabel("rho")
    ax.legend()
    return _save(fig, path)


def census_figure(reports, path) -> Path:
    labels = [r.type.text() for r in reports]
    ours = [r.count or 0 for r in reports]
    pub = [expected_count(r.type) or 0 for r in reports]
    x = np.arange(len(reports))
    fig, ax = plt.subplots(figsize=(max(6, len(reports) * 0.6), 4))
    ax.bar(x - 0.2, ours, 0.4, label="computed", color="#555555")
    ax.bar(x + 0.2, pub, 0.4, label="expected", color="#aaaaaa")
    ax.set_xticks(x, labels, rotation=60, fontsize=7)
    ax.set_ylabel("nonreduced NRS cells")
    ax.legend()
    return _save(fig, path)


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
