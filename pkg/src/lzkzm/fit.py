"""Straight-line fit ``N = n0 + beta * x`` with OLS standard errors."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable


class FitInputError(ValueError):
    pass


@dataclass(frozen=True)
class ScalingFit:
    n0: float
    beta: float
    se_n0: float
    se_beta: float
    r_squared: float
    n_points: int

    def to_json(self) -> dict:
        return asdict(self)


def theory_slope() -> float:
    """Continuum-limit slope ``1 / (2 sqrt(2) pi)``."""
    return 1.0 / (2.0 * math.sqrt(2.0) * math.pi)


def linear_fit(points: Iterable[tuple[float, float]]) -> ScalingFit:
    """Unweighted least squares via the normal equations.

    Sums are taken over the points sorted by ``(x, y)`` with ``math.fsum``, so
    the result does not depend on input order. Standard errors use the
    residual variance with ``n - 2`` degrees of freedom.
    """
    pts = sorted((float(x), float(y)) for x, y in points)
    n = len(pts)
    if n < 3:
        raise FitInputError(f"need at least 3 points, got {n}")
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    xbar = math.fsum(xs) / n
    ybar = math.fsum(ys) / n
    sxx = math.fsum((x - xbar) ** 2 for x in xs)
    if sxx == 0.0:
        raise FitInputError("x values have zero variance")
    sxy = math.fsum((x - xbar) * (y - ybar) for x, y in pts)
    syy = math.fsum((y - ybar) ** 2 for y in ys)
    beta = sxy / sxx
    n0 = ybar - beta * xbar
    sse = math.fsum((y - n0 - beta * x) ** 2 for x, y in pts)
    s2 = sse / (n - 2)
    se_beta = math.sqrt(s2 / sxx)
    se_n0 = math.sqrt(s2 * (1.0 / n + xbar * xbar / sxx))
    r2 = 1.0 - sse / syy if syy > 0 else 1.0
    return ScalingFit(n0, beta, se_n0, se_beta, r2, n)
