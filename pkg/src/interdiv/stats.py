"""Ordinary least squares trend fits with exact t-distribution p-values."""
from __future__ import annotations

import math
from dataclasses import dataclass
from math import fsum

from interdiv.errors import DegenerateFitError

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 500


def _betacf(a, b, x):
    # modified Lentz evaluation of the incomplete-beta continued fraction
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc(a, b, x):
    """Regularized incomplete beta function I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_two_sided_pvalue(t, df):
    """P(|T| >= |t|) for Student's t with ``df`` degrees of freedom."""
    if math.isnan(t):
        return math.nan
    if math.isinf(t):
        return 0.0
    return min(1.0, betainc(df / 2.0, 0.5, df / (df + t * t)))


@dataclass(frozen=True)
class TrendFit:
    slope: float
    intercept: float
    p_value: float
    r_squared: float
    year_range: tuple
    n: int
    stderr: float = math.nan


def ols_trend(points):
    """Fit ``value = intercept + slope * year`` by least squares.

    ``points`` is an iterable of (year, value). The p-value is two-sided for
    slope != 0 with n - 2 degrees of freedom. A series with no variation in
    value is reported as slope 0, p 1, r^2 0.
    """
    pts = [(float(x), float(y)) for x, y in points]
    n = len(pts)
    if n < 3:
        raise DegenerateFitError(f"degenerate fit: need at least 3 points, got {n}")
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    if min(xs) == max(xs):
        raise DegenerateFitError("degenerate fit: all years are equal")
    if any(math.isnan(v) or math.isinf(v) for v in xs + ys):
        raise DegenerateFitError("degenerate fit: non-finite value in series")
    year_range = (min(xs), max(xs))
    year_range = tuple(int(v) if v.is_integer() else v for v in year_range)

    mx = fsum(xs) / n
    my = fsum(ys) / n
    if min(ys) == max(ys):
        return TrendFit(0.0, ys[0], 1.0, 0.0, year_range, n, 0.0)

    dx = [x - mx for x in xs]
    dy = [y - my for y in ys]
    sxx = fsum(u * u for u in dx)
    sxy = fsum(u * v for u, v in zip(dx, dy))
    syy = fsum(v * v for v in dy)
    slope = sxy / sxx
    intercept = my - slope * mx
    rss = fsum((v - slope * u) ** 2 for u, v in zip(dx, dy))
    df = n - 2
    r_squared = min(1.0, max(0.0, 1.0 - rss / syy)) if syy > 0 else 0.0
    stderr = math.sqrt(rss / df / sxx)
    if stderr == 0.0:
        p = 0.0 if slope != 0.0 else 1.0
    else:
        p = t_two_sided_pvalue(slope / stderr, df)
    return TrendFit(slope, intercept, p, r_squared, year_range, n, stderr)
