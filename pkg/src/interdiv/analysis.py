"""Year-by-year series and trend statistics built on the metric kernels.

Every series is assembled in year order. Years without qualifying
publications are left out (listed in ``Series.gaps``) rather than filled with
zeros.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import fsum
from typing import NamedTuple

import numpy as np

from interdiv import metrics
from interdiv.corpus import Corpus, _column, slice_by_year
from interdiv.errors import EmptyRangeError, InconsistentRowError, InvalidThresholdError
from interdiv.metrics import ShareAxis
from interdiv.stats import ols_trend

logger = logging.getLogger(__name__)

PCT_TOL = 1e-6


class Series(list):
    """A list of points plus the years that produced no point."""

    def __init__(self, points=(), gaps=()):
        super().__init__(points)
        self.gaps = list(gaps)


@dataclass(frozen=True)
class FieldTrendPoint:
    field: int  # 1-based
    year: int
    delta: float
    n_pubs: int


@dataclass(frozen=True)
class SdgTrendPoint:
    sdg: int  # 1-based
    year: int
    weighted_delta: float
    total_weight: float
    n_pubs: int


@dataclass(frozen=True)
class YearResult:
    """Distance matrix and per-publication indices for one deduplicated year slice."""

    year: int
    slice: Corpus
    matrix: metrics.DistanceMatrix
    deltas: np.ndarray  # NaN where the publication has no positive field score
    valid: np.ndarray


def _years(year_range):
    start, end = (int(v) for v in year_range)
    if start > end:
        raise EmptyRangeError(f"empty range: {start}..{end}")
    return range(start, end + 1)


def analyze_year(corpus, year):
    """Per-publication indices for ``year``; None if the year has no records."""
    ys = slice_by_year(corpus, year)
    if len(ys) == 0:
        return None
    matrix = metrics.build_distance_matrix(ys)
    deltas, valid = metrics.publication_deltas(ys.field_scores, matrix)
    return YearResult(int(year), ys, matrix, deltas, valid)


def year_results(corpus, year_range, workers=1):
    """``analyze_year`` over a range, in year order (None entries dropped).

    Years are independent, so ``workers > 1`` evaluates them on a thread pool;
    the compiled kernels release the GIL.
    """
    corpus = Corpus.from_records(corpus)
    years = list(_years(year_range))
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda y: analyze_year(corpus, y), years))
    else:
        results = [analyze_year(corpus, y) for y in years]
    return [r for r in results if r is not None]


def _field_numbers(fields, n_fields):
    if fields is None:
        return list(range(1, n_fields + 1))
    return [_column(f, n_fields) + 1 for f in fields]


def field_trends(corpus, year_range, fields=None, workers=1, results=None):
    """Mean publication index per field and year, for several fields at once.

    Returns ``{field_number: Series[FieldTrendPoint]}``.
    """
    corpus = Corpus.from_records(corpus)
    years = list(_years(year_range))
    if results is None:
        results = year_results(corpus, year_range, workers=workers)
    by_year = {r.year: r for r in results}
    out = {}
    for f in _field_numbers(fields, corpus.n_fields):
        col = f - 1
        series = Series()
        for y in years:
            r = by_year.get(y)
            if r is None:
                series.gaps.append(y)
                continue
            members = (r.slice.field_scores[:, col] > 0.0) & r.valid
            values = r.deltas[members]
            if values.size == 0:
                series.gaps.append(y)
                continue
            series.append(FieldTrendPoint(f, y, fsum(values.tolist()) / values.size, int(values.size)))
        out[f] = series
    return out


def field_trend_series(corpus, field, year_range):
    """Field interdisciplinarity per year: the mean index over the field's publications."""
    corpus = Corpus.from_records(corpus)
    f = _column(field, corpus.n_fields) + 1
    return field_trends(corpus, year_range, fields=[f])[f]


def field_publication_points(corpus, field, year_range, results=None):
    """(year, index) for every publication positive in ``field``: the pooled regression input."""
    corpus = Corpus.from_records(corpus)
    col = _column(field, corpus.n_fields)
    if results is None:
        results = year_results(corpus, year_range)
    points = []
    for r in results:
        members = (r.slice.field_scores[:, col] > 0.0) & r.valid
        points.extend((r.year, float(v)) for v in r.deltas[members])
    return points


def field_trend_from_publication_index(rows, field, year_range=None):
    """Rebuild a field series from per-publication rows.

    ``rows`` are (year, delta, positive_fields) with ``positive_fields`` a
    collection of 1-based field numbers.
    """
    per_year = {}
    for year, delta, positive in rows:
        if field in positive and not math.isnan(delta):
            per_year.setdefault(int(year), []).append(float(delta))
    years = sorted(per_year) if year_range is None else list(_years(year_range))
    series = Series()
    for y in years:
        values = per_year.get(y)
        if not values:
            series.gaps.append(y)
            continue
        series.append(FieldTrendPoint(field, y, fsum(values) / len(values), len(values)))
    return series


# --- SDG series -----------------------------------------------------------

@dataclass(frozen=True)
class ShareSeries:
    """Per-year field shares for one SDG.

    ``shares[i, a]`` is field a+1's value in ``years[i]``: its share of the
    SDG's mass (per-sdg axis) or the share of its own mass going to this SDG
    (per-field axis).
    """

    sdg: int
    axis: ShareAxis
    years: tuple
    shares: np.ndarray
    gaps: tuple = ()


def sdg_share_series(corpus, sdg, year_range, axis=ShareAxis.PER_SDG):
    corpus = Corpus.from_records(corpus)
    axis = ShareAxis(axis)
    m = int(sdg) - 1
    if not 0 <= m < corpus.n_sdgs:
        raise KeyError(f"SDG number {sdg} outside 1..{corpus.n_sdgs}")
    years, rows, gaps = [], [], []
    for y in _years(year_range):
        acc = metrics.accumulate_sdg_mass(slice_by_year(corpus, y), corpus.n_fields, corpus.n_sdgs)
        if fsum(acc.cells[:, m].tolist()) <= 0.0:
            gaps.append(y)
            continue
        shares = metrics.contribution_shares(acc, axis)
        years.append(y)
        rows.append(shares.shares[:, m])
    if gaps:
        logger.info("SDG %d: no contribution mass in %d year(s)", m + 1, len(gaps))
    arr = np.array(rows).reshape(len(rows), corpus.n_fields)
    arr.setflags(write=False)
    return ShareSeries(m + 1, axis, tuple(years), arr, tuple(gaps))


def sdg_interdisciplinarity_series(corpus, sdg, year_range, threshold=0.5, results=None):
    """Citation-weighted mean publication index over works with SDG score above ``threshold``."""
    if not 0.0 <= threshold <= 1.0:
        raise InvalidThresholdError(f"invalid threshold {threshold!r}: must lie in [0, 1]")
    corpus = Corpus.from_records(corpus)
    m = int(sdg) - 1
    if not 0 <= m < corpus.n_sdgs:
        raise KeyError(f"SDG number {sdg} outside 1..{corpus.n_sdgs}")
    years = list(_years(year_range))
    if results is None:
        results = year_results(corpus, year_range)
    by_year = {r.year: r for r in results}
    series = Series()
    for y in years:
        r = by_year.get(y)
        if r is None:
            series.gaps.append(y)
            continue
        chosen = (r.slice.sdg_scores[:, m] > threshold) & r.valid
        c = r.slice.citations[chosen].astype(np.float64)
        total = fsum(c.tolist())
        if total <= 0.0:
            series.gaps.append(y)
            continue
        weighted = fsum((c * r.deltas[chosen]).tolist()) / total
        series.append(SdgTrendPoint(m + 1, y, weighted, total, int(chosen.sum())))
    if series.gaps:
        logger.info("SDG %d: %d year(s) without citation weight above threshold", m + 1, len(series.gaps))
    return series


# --- trend tests ----------------------------------------------------------

class TrendCounts(NamedTuple):
    n_declining_pre: int
    n_rising_post: int
    detail: dict  # field -> {"pre": TrendFit, "post": TrendFit}


def classify_trends(series_by_field, split_year=2000, alpha=0.001):
    """Count fields with a significant decline before and rise from ``split_year``.

    ``series_by_field`` maps a field to (year, value) pairs; the windows are
    ``year < split_year`` and ``year >= split_year``.
    """
    detail = {}
    n_down = n_up = 0
    for f, points in series_by_field.items():
        pre = ols_trend([(y, v) for y, v in points if y < split_year])
        post = ols_trend([(y, v) for y, v in points if y >= split_year])
        detail[f] = {"pre": pre, "post": post}
        if pre.slope < 0 and pre.p_value < alpha:
            n_down += 1
        if post.slope > 0 and post.p_value < alpha:
            n_up += 1
    return TrendCounts(n_down, n_up, detail)


def count_significant_trends(corpus, split_year=2000, year_range=(1970, 2022), alpha=0.001,
                             mode="yearly-mean", workers=1):
    """Fit pre/post-split trends for every field and count significant ones.

    ``mode="yearly-mean"`` regresses the per-year field means; ``"pooled"``
    regresses every publication-level index.
    """
    corpus = Corpus.from_records(corpus)
    results = year_results(corpus, year_range, workers=workers)
    if mode == "yearly-mean":
        trends = field_trends(corpus, year_range, results=results)
        series = {f: [(p.year, p.delta) for p in pts] for f, pts in trends.items()}
    elif mode == "pooled":
        series = {
            f: field_publication_points(corpus, f, year_range, results=results)
            for f in range(1, corpus.n_fields + 1)
        }
    else:
        raise ValueError(f"unknown regression mode {mode!r}")
    return classify_trends(series, split_year=split_year, alpha=alpha)


# --- term prevalence ------------------------------------------------------

def idr_share_series(rows):
    """Percentage of term-matching works per year, overall and per domain.

    Returns ``{label: [(year, pct), ...]}`` with labels ``all`` and
    ``domain1``..``domain4``. Stored percentages are checked against the
    recomputed ones.
    """
    out = {}
    for row in sorted(rows, key=lambda r: r.year):
        for label, count, total, stored in row.pairs():
            if count < 0 or total < 0 or count > total:
                raise InconsistentRowError(
                    f"inconsistent row: year {row.year} {label} has count {count} > total {total}"
                )
            series = out.setdefault(label, [])
            if total == 0:
                continue
            pct = 100.0 * count / total
            if stored is not None and abs(stored - pct) > PCT_TOL:
                raise InconsistentRowError(
                    f"inconsistent row: year {row.year} {label} stores {stored}% but counts give {pct!r}%"
                )
            series.append((row.year, pct))
    return out
