"""Monte Carlo experiment harness and table emission.

Three suites: `connected` runs the anchor protocol over random connected
networks, `bounded` runs the rectangle planner against scattered sensors,
and `compare` evaluates the closed-form path lengths of all schemes.
Every suite is deterministic given its configuration and seed; per-trial
seeds are derived arithmetically so trials are independent of execution
order, and emitted CSV is byte-stable.
"""

from __future__ import annotations

import math
import random
import statistics
from dataclasses import dataclass, field
from typing import Optional

from .comparators import COMPETITORS, SchemeParams
from .geom import Point2D
from .localizer import LocalizationParams, U_RATIO_SAFE
from .planner import (Rect, coverage_margin, d_hexagon_formula, plan_rect_path,
                      simulate_plan_reception)
from .protocol import Network, build_network, run_localization

REJECTION_BUDGET = 10_000


@dataclass
class ExperimentConfig:
    mode: str  # connected | bounded | compare | plan
    n: int = 50
    area: Rect = field(default_factory=lambda: Rect(50.0, 50.0))
    r_values: tuple[float, ...] = (10.0,)
    k_values: tuple[int, ...] = (10,)
    x_override: Optional[float] = None
    trials: int = 30
    seed: int = 1
    grid_step: float = 2.0
    unsafe: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("need at least one trial")
        for r in self.r_values:
            for k in self.k_values:
                u = r / k
                if not u < r:
                    raise ValueError("beacon distance must be below the range")
                if self.mode == "connected" and u > r * U_RATIO_SAFE and not self.unsafe:
                    raise ValueError(
                        "beacon distance above r/7.5 voids the error bound; "
                        "pass unsafe=True to force")


@dataclass
class TrialResult:
    per_sensor_errors: list[float]
    mean_error: float
    max_error: float
    path_length: float
    localized_fraction: float
    seed: int


def gen_connected_network(n: int, area: Rect, r: float, seed: int) -> Network:
    """Uniform random deployment, resampled whole until connected."""
    if n < 1:
        raise ValueError("need at least one sensor")
    rng = random.Random(seed)
    for _ in range(REJECTION_BUDGET):
        pts = [Point2D(area.origin.x + rng.uniform(0.0, area.width),
                       area.origin.y + rng.uniform(0.0, area.height))
               for _ in range(n)]
        try:
            return build_network(pts, r)
        except ValueError:
            continue
    raise ValueError("could not generate connected network")


def _trial_seed(base: int, cell: int, trial: int) -> int:
    return base * 1_000_003 + cell * 1_009 + trial


def run_connected_trial(n: int, area: Rect, r: float, k: int,
                        seed: int) -> TrialResult:
    u = r / k
    params = LocalizationParams(r=r, u=u)
    net = gen_connected_network(n, area, r, seed)
    start = Point2D(area.origin.x + area.width / 2.0,
                    area.origin.y + area.height / 2.0)
    res = run_localization(net, params, start, seed)
    errs = [res.errors[i] for i in sorted(res.errors)]
    return TrialResult(
        per_sensor_errors=errs,
        mean_error=statistics.fmean(errs) if errs else math.nan,
        max_error=max(errs) if errs else math.nan,
        path_length=res.total_path_length,
        localized_fraction=len(res.estimates) / n,
        seed=seed,
    )


def run_connected_suite(cfg: ExperimentConfig) -> tuple[list[str], list[list]]:
    """Mean error and path length per (r, u) cell, averaged over trials."""
    header = ["r", "u", "mean_error", "std_error", "mean_path",
              "localized_fraction", "trials"]
    rows: list[list] = []
    cell = 0
    for r in cfg.r_values:
        for k in cfg.k_values:
            results = [run_connected_trial(cfg.n, cfg.area, r, k,
                                           _trial_seed(cfg.seed, cell, t))
                       for t in range(cfg.trials)]
            means = [t.mean_error for t in results]
            rows.append([
                r, r / k,
                statistics.fmean(means),
                statistics.stdev(means) if len(means) > 1 else 0.0,
                statistics.fmean(t.path_length for t in results),
                statistics.fmean(t.localized_fraction for t in results),
                cfg.trials,
            ])
            cell += 1
    return header, rows


def run_bounded_trial(plan, n: int, area: Rect, params: LocalizationParams,
                      seed: int) -> TrialResult:
    rng = random.Random(seed)
    pts = [Point2D(area.origin.x + rng.uniform(0.0, area.width),
                   area.origin.y + rng.uniform(0.0, area.height))
           for _ in range(n)]
    outcomes = simulate_plan_reception(plan, pts, params)
    errs = [o.error for o in outcomes if o.estimate is not None]
    return TrialResult(
        per_sensor_errors=errs,
        mean_error=statistics.fmean(errs) if errs else math.nan,
        max_error=max(errs) if errs else math.nan,
        path_length=plan.total_length,
        localized_fraction=len(errs) / n,
        seed=seed,
    )


def run_bounded_suite(cfg: ExperimentConfig) -> tuple[list[str], list[list]]:
    """Plan length and localization error for scattered sensors."""
    header = ["r", "u", "x", "plan_length", "mean_error", "std_error",
              "localized_fraction", "trials"]
    rows: list[list] = []
    cell = 0
    for r in cfg.r_values:
        for k in cfg.k_values:
            u = r / k
            x = cfg.x_override if cfg.x_override is not None else u
            params = LocalizationParams(r=r, u=u)
            plan = plan_rect_path(cfg.area, r, x, u)
            results = [run_bounded_trial(plan, cfg.n, cfg.area, params,
                                         _trial_seed(cfg.seed, cell, t))
                       for t in range(cfg.trials)]
            means = [t.mean_error for t in results]
            rows.append([
                r, u, x,
                plan.total_length,
                statistics.fmean(means),
                statistics.stdev(means) if len(means) > 1 else 0.0,
                statistics.fmean(t.localized_fraction for t in results),
                cfg.trials,
            ])
            cell += 1
    return header, rows


def improvement_percentages(hexagon_values: list[float],
                            scheme_values: list[float]) -> float:
    """Average percentage saved by the hexagon route against one scheme.

    Both lists hold path lengths over the same margin grid; the figure is
    the relative reduction of the grid means.
    """
    hex_mean = statistics.fmean(hexagon_values)
    other_mean = statistics.fmean(scheme_values)
    return (1.0 - hex_mean / other_mean) * 100.0


def run_compare(cfg: ExperimentConfig,
                measure: bool = True) -> tuple[list[str], list[list], dict]:
    """Path-length table over X in {r/10, r/15, r/20} plus improvements.

    Emits the closed-form hexagon length and, when `measure` is set, the
    length of an actually generated plan; improvement percentages are
    reported against both, labelled `improvement_formula_pct` and
    `improvement_measured_pct`.
    """
    r = cfg.r_values[0]
    L = cfg.area.width
    ks = cfg.k_values if len(cfg.k_values) > 1 else (10, 15, 20)
    header = ["x", "d_hexagon_formula", "d_hexagon_measured"] + \
        [f"d_{name}" for name in COMPETITORS]
    rows: list[list] = []
    formula_col: list[float] = []
    measured_col: list[float] = []
    scheme_cols: dict[str, list[float]] = {name: [] for name in COMPETITORS}
    for k in ks:
        x = r / k
        formula = d_hexagon_formula(L, r, x)
        formula_col.append(formula)
        if measure:
            u = x  # margin equal to the beacon distance, as in the error runs
            plan = plan_rect_path(Rect(L, L, cfg.area.origin), r, x, u)
            measured = plan.total_length
        else:
            measured = math.nan
        measured_col.append(measured)
        row = [x, formula, measured]
        for name, fn in COMPETITORS.items():
            v = fn(SchemeParams(L=L, r=r, k=k))
            scheme_cols[name].append(v)
            row.append(v)
        rows.append(row)
    improvements = {}
    for name in COMPETITORS:
        improvements[name] = {
            "improvement_formula_pct":
                improvement_percentages(formula_col, scheme_cols[name]),
            "improvement_measured_pct":
                improvement_percentages(measured_col, scheme_cols[name])
                if measure else math.nan,
        }
    return header, rows, improvements


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def rows_to_csv(header: list[str], rows: list[list]) -> str:
    def cell(v) -> str:
        if isinstance(v, float):
            return repr(v)
        return str(v)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(cell(v) for v in row))
    return "\n".join(lines) + "\n"


def rows_to_json(header: list[str], rows: list[list]) -> str:
    import json
    return json.dumps([dict(zip(header, row)) for row in rows], indent=2)
