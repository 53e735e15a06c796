"""Command-line interface.

Subcommands:
    connected   protocol simulation over random connected networks
    bounded     rectangle planner against scattered sensors
    compare     closed-form path-length comparison and improvements
    plan        emit the waypoint CSV of a rectangle plan
    verify      grid audit of a rectangle plan (coverage + worst error)

Exit code 0 on success, 2 when a safe-mode invariant is violated (a
localized sensor beyond the r/2 error bound or an uncovered grid point).
"""

from __future__ import annotations

import argparse
import sys

from .experiments import (ExperimentConfig, rows_to_csv, rows_to_json,
                          run_bounded_suite, run_compare, run_connected_suite)
from .localizer import LocalizationParams, U_RATIO_SAFE
from .planner import (Rect, coverage_margin, plan_rect_path, plan_to_csv,
                      report_to_json, verify_coverage)


def _parse_area(text: str) -> Rect:
    try:
        w, h = text.lower().split("x")
        return Rect(float(w), float(h))
    except Exception:
        raise argparse.ArgumentTypeError("area must look like 50x50")


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(","))


def _parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(","))


def _write(out: str | None, payload: str) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=50, help="number of sensors")
    p.add_argument("--area", type=_parse_area, default=Rect(50.0, 50.0),
                   help="deployment rectangle, e.g. 50x50")
    p.add_argument("--r", type=_parse_floats, default=(10.0,),
                   help="communication range(s), comma separated")
    p.add_argument("--k", type=_parse_ints, default=(10,),
                   help="resolution(s): beacon distance u = r/k")
    p.add_argument("--x", type=float, default=None,
                   help="coverage margin override (default: u)")
    p.add_argument("--trials", type=int, default=30)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--grid-step", type=float, default=2.0)
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--unsafe", action="store_true",
                   help="allow beacon distances above r/7.5")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hexloc", description=__doc__)
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in ("connected", "bounded", "compare", "plan", "verify"):
        _add_common(sub.add_parser(mode))
    return parser


def _config(args, mode: str) -> ExperimentConfig:
    return ExperimentConfig(mode=mode, n=args.n, area=args.area,
                            r_values=args.r, k_values=args.k,
                            x_override=args.x, trials=args.trials,
                            seed=args.seed, grid_step=args.grid_step,
                            unsafe=args.unsafe)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    mode = args.mode

    if mode == "connected":
        cfg = _config(args, mode)
        header, rows = run_connected_suite(cfg)
        payload = rows_to_csv(header, rows) if args.format == "csv" \
            else rows_to_json(header, rows)
        _write(args.out, payload)
        frac_idx = header.index("localized_fraction")
        if any(row[frac_idx] < 1.0 for row in rows):
            return 2
        return 0

    if mode == "bounded":
        cfg = _config(args, mode)
        header, rows = run_bounded_suite(cfg)
        payload = rows_to_csv(header, rows) if args.format == "csv" \
            else rows_to_json(header, rows)
        _write(args.out, payload)
        return 0

    if mode == "compare":
        cfg = _config(args, mode)
        header, rows, improvements = run_compare(cfg)
        payload = rows_to_csv(header, rows)
        lines = [payload, "scheme,improvement_formula_pct,improvement_measured_pct\n"]
        for name, vals in improvements.items():
            lines.append(f"{name},{vals['improvement_formula_pct']!r},"
                         f"{vals['improvement_measured_pct']!r}\n")
        _write(args.out, "".join(lines))
        return 0

    r = args.r[0]
    k = args.k[0]
    u = r / k
    x = args.x if args.x is not None else max(u, coverage_margin(r, u))
    if u > r * U_RATIO_SAFE and not args.unsafe:
        sys.stderr.write("beacon distance above r/7.5; pass --unsafe to force\n")
        return 2
    plan = plan_rect_path(args.area, r, x, u)

    if mode == "plan":
        _write(args.out, plan_to_csv(plan))
        return 0

    # verify
    params = LocalizationParams(r=r, u=u)
    report = verify_coverage(plan, args.area, params, args.grid_step)
    _write(args.out, report_to_json(report) + "\n")
    if report.uncovered or (report.localized_count and
                            report.worst_error >= r / 2.0):
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
