"""Command-line interface: ``sl3hess <command> ...``.

Exit status is 0 on success, 2 on bad input and 3 when a budget (cell count
or wall clock) runs out.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from pathlib import Path

from .errors import BudgetExceeded, RegionTooLarge, Sl3Error
from .exact import Mat3
from .hessenberg import HessenbergType, RaySpec, complete_type, is_valid_completion
from .klein_voronoi import factor_sail
from .reduction import min_md_over_candidates, shared_reduced, sigma_reduced_set
from .render import render
from .spectra import spectrum_class
from .survey import (
    CellClass,
    Config,
    Window,
    census,
    is_nrs_ray,
    load_config,
    ray_diagnostics,
    scan_family,
    scan_ray,
)

EXIT_INPUT = 2
EXIT_BUDGET = 3


def _span(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}")
    return int(lo), int(hi)


def _ints(text: str) -> tuple:
    try:
        return tuple(int(a) for a in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _matrix(text: str) -> Mat3:
    try:
        return Mat3.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _type(text: str) -> HessenbergType:
    try:
        return HessenbergType.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _config(args) -> Config:
    cfg = load_config(args.config) if args.config else Config()
    return cfg.replace(
        box_bound=args.box_bound,
        orbit_samples=args.orbit_samples,
        padding=args.padding,
        cell_budget=args.cell_budget,
        cache_dir=args.cache_dir,
        workers=args.workers,
    )


def _completion(t: HessenbergType, v) -> tuple:
    if v is None:
        return complete_type(t)
    if not is_valid_completion(t, v):
        raise Sl3Error(f"{v} does not complete {t} to determinant 1")
    return v


def _emit(data, out=None) -> None:
    text = data if isinstance(data, bytes) else (json.dumps(data, indent=1, sort_keys=True) + "\n").encode()
    if out:
        Path(out).write_bytes(text)
    else:
        sys.stdout.write(text.decode())


def cmd_classify(args, cfg) -> int:
    t = args.type
    v = _completion(t, args.v)
    grid = scan_family(t, v, Window(*args.m, *args.n), cfg, rs=not args.skip_rs)
    if args.out:
        _emit(render(grid, "json"), args.out)
    if args.svg:
        Path(args.svg).write_bytes(render(grid, "svg"))
    if args.csv:
        Path(args.csv).write_bytes(render(grid, "csv"))
    if args.figures:
        from .figures import grid_figure

        grid_figure(grid, Path(args.figures) / f"grid_{t.text().replace('|', '_').replace(',', '')}.png")
    counts = {c.value: grid.count(c) for c in CellClass if grid.count(c)}
    _emit({"type": t.text(), "v": list(v), "counts": counts, "nonreduced": [list(k) for k in grid.nonreduced()]})
    return 0


def cmd_reduce(args, cfg) -> int:
    m = args.matrix
    kw = {"samples": cfg.orbit_samples, "padding": cfg.padding, "budget": cfg.cell_budget}
    rs = sigma_reduced_set(m, **kw)
    _, argmins = min_md_over_candidates(m, **kw)
    data = rs.to_json()
    data.update(input=m.text(), spectrum=spectrum_class(m).value, argmins=[list(w) for w in argmins])
    _emit(data)
    return 0


def cmd_conjugate(args, cfg) -> int:
    kw = {"samples": cfg.orbit_samples, "padding": cfg.padding, "budget": cfg.cell_budget}
    shared = shared_reduced(args.m1, args.m2, **kw)
    _emit({"conjugate": bool(shared), "shared": [h.text() for h in shared]})
    return 0


def cmd_sail(args, cfg) -> int:
    sail = factor_sail(args.matrix, args.bound)
    _emit(render(sail, "json"), args.out)
    if args.svg:
        Path(args.svg).write_bytes(render(sail, "svg"))
    if args.figures:
        from .figures import sail_figure

        sail_figure(sail, Path(args.figures) / "sail.png")
    return 0


def cmd_census(args, cfg) -> int:
    deadline = time.monotonic() + args.time_budget if args.time_budget else None
    reports = census(args.max_complexity, cfg, deadline=deadline, start=args.start, max_half=args.max_half)
    _emit(render(reports, "csv"), args.out)
    if args.json:
        Path(args.json).write_bytes(render(reports, "json"))
    if args.figures:
        from .figures import census_figure

        census_figure(reports, Path(args.figures) / "census.png")
    return 0 if all(r.stabilized for r in reports) else EXIT_BUDGET


def cmd_ray(args, cfg) -> int:
    t = args.type
    r = RaySpec(t, _completion(t, args.v), args.base, args.index)
    scan = scan_ray(r, args.steps, cfg)
    data = scan.to_json()
    data["nrs_ray"] = is_nrs_ray(r)
    _emit(data, args.out)
    return 0


def cmd_diagnose_ray(args, cfg) -> int:
    t = args.type
    r = RaySpec(t, _completion(t, args.v), args.base, 1)
    diag = ray_diagnostics(r, args.t_values, args.point)
    _emit(diag.to_json(), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value settings file")
    common.add_argument("--box-bound", type=int)
    common.add_argument("--orbit-samples", type=int)
    common.add_argument("--padding", type=float)
    common.add_argument("--cell-budget", type=int)
    common.add_argument("--cache-dir")
    common.add_argument("--workers", type=int)
    common.add_argument("--figures", metavar="DIR", help="also write PNG figures here")

    p = argparse.ArgumentParser(prog="sl3hess", description="Reduced Hessenberg forms of SL(3,Z) matrices.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", parents=[common], help="classify every cell of a family window")
    c.add_argument("--type", type=_type, required=True)
    c.add_argument("--v", type=_ints)
    c.add_argument("--m", type=_span, default=(-20, 20))
    c.add_argument("--n", type=_span, default=(-20, 20))
    c.add_argument("--out")
    c.add_argument("--svg")
    c.add_argument("--csv")
    c.add_argument("--skip-rs", action="store_true", help="leave RS cells undecided")
    c.set_defaults(func=cmd_classify)

    c = sub.add_parser("reduce", parents=[common], help="reduced set of an NRS matrix")
    c.add_argument("--matrix", type=_matrix, required=True)
    c.set_defaults(func=cmd_reduce)

    c = sub.add_parser("conjugate", parents=[common], help="decide integer conjugacy of two NRS matrices")
    c.add_argument("--m1", type=_matrix, required=True)
    c.add_argument("--m2", type=_matrix, required=True)
    c.set_defaults(func=cmd_conjugate)

    c = sub.add_parser("sail", parents=[common], help="factor-sail of an NRS matrix")
    c.add_argument("--matrix", type=_matrix, required=True)
    c.add_argument("--bound", type=int, default=30)
    c.add_argument("--out")
    c.add_argument("--svg")
    c.set_defaults(func=cmd_sail)

    c = sub.add_parser("census", parents=[common], help="stabilised nonreduced counts as CSV")
    c.add_argument("--max-complexity", type=int, default=4)
    c.add_argument("--start", type=int, default=16)
    c.add_argument("--max-half", type=int, default=256)
    c.add_argument("--time-budget", type=float, help="seconds")
    c.add_argument("--out")
    c.add_argument("--json")
    c.set_defaults(func=cmd_census)

    c = sub.add_parser("ray", parents=[common], help="verdicts along an integer ray")
    c.add_argument("--type", type=_type, required=True)
    c.add_argument("--v", type=_ints)
    c.add_argument("--index", type=int, choices=(1, 2), default=1)
    c.add_argument("--base", type=_ints, default=(0, 0))
    c.add_argument("--steps", type=int, default=50)
    c.add_argument("--out")
    c.set_defaults(func=cmd_ray)

    c = sub.add_parser("diagnose-ray", parents=[common], help="MD slope and axis-ratio exponent on a ray")
    c.add_argument("--type", type=_type, required=True)
    c.add_argument("--v", type=_ints)
    c.add_argument("--base", type=_ints, default=(0, 0))
    c.add_argument("--point", type=_ints, default=(1, 1, 0))
    c.add_argument("--t-values", type=_ints, default=(1000, 3000, 10000))
    c.add_argument("--out")
    c.set_defaults(func=cmd_diagnose_ray)
    return p


def _attach_negative_values(argv: list) -> list:
    """Turn ``--m -20:20`` into ``--m=-20:20``; argparse would otherwise read
    the value as an option."""
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if a.startswith("--") and "=" not in a and nxt and re.fullmatch(r"-\d[\d,:;\-]*", nxt):
            out.append(f"{a}={nxt}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_attach_negative_values(argv))
    try:
        cfg = _config(args)
        return args.func(args, cfg)
    except (BudgetExceeded, RegionTooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (Sl3Error, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
