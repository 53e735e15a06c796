"""Closed-form path lengths of prior coverage schemes for an L x L square.

All schemes are normalized to a resolution parameter k > 1 (the movement
resolution is r/k, r being the communication range).  Values are returned
unrounded; comparisons against published integer tables should round.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class SchemeParams:
    """Square side L, communication range r, integer resolution k (>1)."""

    L: float
    r: float
    k: int

    def __post_init__(self):
        if not (self.L > 0 and self.r > 0):
            raise ValueError("L and r must be positive")
        if self.k < 2:
            raise ValueError("k must be at least 2")


def d_chia_ho_ou(p: SchemeParams) -> float:
    """Boustrophedon sweep with end extensions; identical to the scan scheme."""
    step = p.r - p.r / p.k
    lines = math.ceil((p.L + 2 * p.r) / step)
    return (p.L + 2 * p.r) * (lines + 1) + step * lines


# The scan scheme shares the same closed form.
d_scan = d_chia_ho_ou


def d_doublescan(p: SchemeParams) -> float:
    """Sweeps along both axes."""
    step = p.r - p.r / p.k
    span = p.L + p.r + p.r / p.k
    return 2.0 * ((span / (2.0 * step) + 1.0) * (p.L + 2 * p.r) + span)


def d_hilbert(p: SchemeParams) -> float:
    """Space-filling curve at cell size r - r/k."""
    step = p.r - p.r / p.k
    return ((p.L + 2 * p.r) / step) ** 2 * step


def d_circles(p: SchemeParams) -> float:
    """Concentric circles, enlarged to reach the square's corners."""
    step = p.r - p.r / p.k
    n = (p.L / math.sqrt(2.0) - p.r) / step
    return n * n * math.pi * step + p.L


def d_s_curves(p: SchemeParams) -> float:
    """Stacked half-circle S-curves."""
    step = p.r - p.r / p.k
    span = p.L + p.r + p.r / p.k
    return ((span / (1.5 * p.r) + 1.0) * (p.L + 2 * p.r) / 2.0 * math.pi
            + span + step * math.pi / 2.0)


def hexagon_leading_coefficient(k: int) -> float:
    """Coefficient of L^2/r in the hexagon-tiling path length."""
    f = 2.0 * k / (2.0 * k - 1.0)
    return (1.0 / math.sqrt(3.0)) * f * (f + 1.0 / math.sqrt(3.0))


def leading_coefficients(k: int) -> dict[str, float]:
    """Coefficients of the dominant L^2/r term for every scheme.

    The hexagon coefficient is strictly the smallest for every k >= 2 and
    drops below 1 from k = 10 on, while k/(k-1) stays above 1.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    base = k / (k - 1.0)
    return {
        "hexagon": hexagon_leading_coefficient(k),
        "chia_ho_ou": base,
        "doublescan": base,
        "hilbert": base,
        "s_curves": math.pi / 3.0 * base,
        "circles": math.pi / 2.0 * base,
    }


COMPETITORS = {
    "chia_ho_ou": d_chia_ho_ou,
    "doublescan": d_doublescan,
    "hilbert": d_hilbert,
    "circles": d_circles,
    "s_curves": d_s_curves,
}
