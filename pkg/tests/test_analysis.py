import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import make_corpus, unit
from interdiv import analysis
from interdiv.corpus import TermCountRow
from interdiv.errors import EmptyRangeError, InconsistentRowError, InvalidThresholdError
from interdiv.metrics import ShareAxis


def filler(tag, k, field, year=2000, cites=1, sdgs=None):
    return (tag, year, cites, unit(k, field), sdgs or [0.0])


def two_pub_slice():
    """Field 1 holds exactly two works with indices 1.5 and 2.5."""
    k = 5
    rows = [
        ("P1", 2000, 1, [0.5, 0.5, 0, 0, 0], [0.0]),
        ("P2", 2000, 1, [0.1, 0, 0.3, 0.3, 0.3], [0.0]),
        filler("f2", k, 1),
        filler("f3", k, 2),
    ]
    rows += [filler(f"f4_{i}", k, 3) for i in range(4)]
    rows += [filler(f"f5_{i}", k, 4) for i in range(4)]
    return rows


def test_field_trend_single_field_publication(backend):
    c = make_corpus([("W1", 2000, 1, unit(19, 6), unit(17, 0))])
    pts = analysis.field_trend_series(c, 7, (2000, 2000))
    assert pts == [analysis.FieldTrendPoint(7, 2000, 1.0, 1)]


def test_field_trend_two_publication_mean(backend):
    rows = two_pub_slice()
    d = oracles.distance_matrix_by_enumeration([r[3] for r in rows], 5)
    deltas = [oracles.delta_by_double_sum(r[3], d) for r in rows[:2]]
    assert deltas == pytest.approx([1.5, 2.5], abs=1e-12)
    pts = analysis.field_trend_series(make_corpus(rows), 1, (2000, 2000))
    assert pts[0].delta == pytest.approx(2.0, abs=1e-12) and pts[0].n_pubs == 2


def test_field_trend_gaps_and_empty_range():
    c = make_corpus([("W1", 2000, 1, unit(19, 6), unit(17, 0)), ("W2", 2002, 1, unit(19, 1), unit(17, 0))])
    pts = analysis.field_trend_series(c, 7, (1999, 2002))
    assert [p.year for p in pts] == [2000] and pts.gaps == [1999, 2001, 2002]
    with pytest.raises(EmptyRangeError):
        analysis.field_trend_series(c, 7, (2002, 2000))


def random_corpus(seed, n=80, k=5, s=3, years=(2000, 2003)):
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(n):
        f = rng.random(k) * (rng.random(k) < 0.4)
        rows.append((f"W{i}", int(rng.integers(years[0], years[1] + 1)), int(rng.integers(0, 100)),
                     f.tolist(), (rng.random(s) * (rng.random(s) < 0.6)).tolist()))
    return rows


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_field_mean_within_bounds(seed):
    rows = random_corpus(seed)
    c = make_corpus(rows)
    results = analysis.year_results(c, (2000, 2003))
    trends = analysis.field_trends(c, (2000, 2003), results=results)
    by_year = {r.year: r for r in results}
    for f, pts in trends.items():
        for p in pts:
            r = by_year[p.year]
            vals = r.deltas[(r.slice.field_scores[:, f - 1] > 0) & r.valid]
            assert vals.min() - 1e-15 <= p.delta <= vals.max() + 1e-15
            assert 1.0 <= p.delta <= 5.0


def test_parallel_years_match_serial():
    c = make_corpus(random_corpus(5, n=300, years=(1990, 2005)))
    serial = analysis.field_trends(c, (1990, 2005))
    parallel = analysis.field_trends(c, (1990, 2005), workers=4)
    assert serial == parallel


def test_field_trend_from_publication_index_matches():
    c = make_corpus(random_corpus(11))
    rows = []
    for r in analysis.year_results(c, (2000, 2003)):
        for i in np.flatnonzero(r.valid):
            rows.append((r.year, float(r.deltas[i]), {a + 1 for a in range(5) if r.slice.field_scores[i, a] > 0}))
    direct = analysis.field_trends(c, (2000, 2003))
    for f in range(1, 6):
        assert analysis.field_trend_from_publication_index(rows, f, (2000, 2003)) == direct[f]


# --- SDG shares -----------------------------------------------------------

def test_sdg_share_single_publication():
    c = make_corpus([("W1", 2010, 4, unit(19, 6, value=0.7), unit(17, 2, value=0.8))])
    s = analysis.sdg_share_series(c, 3, (2010, 2010))
    assert s.years == (2010,) and s.shares[0, 6] == 1.0 and s.shares.sum() == 1.0


def test_sdg_share_two_field_hand_sums():
    rows = [
        ("A", 2000, 10, [0.9, 0.0], [0.5, 0.0]),
        ("B", 2000, 2, [0.3, 0.6], [0.25, 0.4]),
        ("C", 2000, 0, [0.0, 1.0], [1.0, 1.0]),
        ("D", 2001, 1, [0.0, 0.2], [0.0, 0.1]),
    ]
    c = make_corpus(rows)
    # SDG 1, 2000: field 1 -> 10*0.5 + 2*0.25 = 5.5; field 2 -> 2*0.25 = 0.5
    s = analysis.sdg_share_series(c, 1, (2000, 2001), ShareAxis.PER_SDG)
    assert s.years == (2000,) and s.gaps == (2001,)
    np.testing.assert_allclose(s.shares[0], [5.5 / 6.0, 0.5 / 6.0], rtol=0, atol=1e-15)
    pubs = [(r[2], r[3], r[4]) for r in rows if r[1] == 2000]
    cells = oracles.sdg_mass_by_enumeration(pubs, 2, 2)
    # per-field: field 2 puts 0.5 of its 0.5 + 0.8 mass into SDG 1
    s = analysis.sdg_share_series(c, 1, (2000, 2000), ShareAxis.PER_FIELD)
    np.testing.assert_allclose(s.shares[0], [cells[0][0] / sum(cells[0]), cells[1][0] / sum(cells[1])],
                               rtol=0, atol=1e-15)


# --- SDG interdisciplinarity ----------------------------------------------

def delta3_corpus(c_single=1, c_multi=3):
    """Q spans four fields (index 3); R is a single-field work (index 1); both above threshold."""
    k = 4
    rows = [("Q", 2000, c_multi, [0.25] * 4, [0.9])]
    rows.append(("R", 2000, c_single, unit(k, 0), [0.6]))
    rows += [(f"f0_{i}", 2000, 5, unit(k, 0), [0.5]) for i in range(3)]
    for a in range(1, 4):
        rows += [(f"f{a}_{i}", 2000, 5, unit(k, a), [0.2]) for i in range(4)]
    return rows


def test_sdg_trend_single_qualifier():
    rows = two_pub_slice()
    rows[0] = ("P1", 2000, 7, rows[0][3], [0.8])
    pts = analysis.sdg_interdisciplinarity_series(make_corpus(rows), 1, (2000, 2000))
    assert len(pts) == 1 and pts[0].weighted_delta == pytest.approx(1.5, abs=1e-12) and pts[0].n_pubs == 1


def test_sdg_trend_weighted_mean():
    rows = delta3_corpus()
    d = oracles.distance_matrix_by_enumeration([r[3] for r in rows], 4)
    assert oracles.delta_by_double_sum(rows[0][3], d) == pytest.approx(3.0, abs=1e-12)
    pts = analysis.sdg_interdisciplinarity_series(make_corpus(rows), 1, (2000, 2000), threshold=0.5)
    # (1*1 + 3*3) / (1 + 3); fillers at exactly 0.5 are not above the threshold
    assert pts[0].weighted_delta == pytest.approx(2.5, abs=1e-12)
    assert pts[0].n_pubs == 2 and pts[0].total_weight == 4.0


def test_sdg_trend_zero_weight_is_gap():
    rows = delta3_corpus(c_single=0, c_multi=0)
    pts = analysis.sdg_interdisciplinarity_series(make_corpus(rows), 1, (2000, 2000))
    assert list(pts) == [] and pts.gaps == [2000]


@pytest.mark.parametrize("t", [-0.1, 1.5])
def test_invalid_threshold(t):
    with pytest.raises(InvalidThresholdError):
        analysis.sdg_interdisciplinarity_series(make_corpus(delta3_corpus()), 1, (2000, 2000), threshold=t)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 1000))
def test_weighted_delta_scale_invariant(seed, factor):
    rows = random_corpus(seed)
    scaled = [(r[0], r[1], r[2] * factor, r[3], r[4]) for r in rows]
    a = analysis.sdg_interdisciplinarity_series(make_corpus(rows), 1, (2000, 2003), threshold=0.2)
    b = analysis.sdg_interdisciplinarity_series(make_corpus(scaled), 1, (2000, 2003), threshold=0.2)
    assert [p.year for p in a] == [p.year for p in b]
    for p, q in zip(a, b):
        assert q.weighted_delta == pytest.approx(p.weighted_delta, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 1), st.floats(0, 1))
def test_threshold_monotone_selection(seed, t1, t2):
    lo, hi = sorted((t1, t2))
    c = make_corpus(random_corpus(seed))
    a = {p.year: p.n_pubs for p in analysis.sdg_interdisciplinarity_series(c, 2, (2000, 2003), lo)}
    b = {p.year: p.n_pubs for p in analysis.sdg_interdisciplinarity_series(c, 2, (2000, 2003), hi)}
    for year, n in b.items():
        assert n <= a[year]


# --- regressions ----------------------------------------------------------

def trend_corpus(perm=None):
    """Fields 1-3 lose shared works before 1990; fields 4-5 gain them from 1990."""
    k = 5
    perm = perm or list(range(k))

    def place(v):
        out = [0.0] * k
        for a, x in enumerate(v):
            out[perm[a]] = x
        return out

    rows = []
    for y in range(1980, 2000):
        n_x = (10 - (y - 1980)) if y < 1990 else 5
        n_y = 5 if y < 1990 else (y - 1989)
        for a in range(k):
            rows += [(f"s{a}_{y}_{i}", y, 1, place(unit(k, a)), [0.0]) for i in range(30)]
        rows += [(f"x{y}_{i}", y, 1, place([1.0, 1.0, 1.0, 0, 0]), [0.0]) for i in range(n_x)]
        rows += [(f"y{y}_{i}", y, 1, place([0, 0, 0, 1.0, 1.0]), [0.0]) for i in range(n_y)]
    return make_corpus(rows)


def test_count_significant_trends_construction():
    counts = analysis.count_significant_trends(trend_corpus(), split_year=1990, year_range=(1980, 1999))
    assert (counts.n_declining_pre, counts.n_rising_post) == (3, 2)
    for f in (1, 2, 3):
        assert counts.detail[f]["pre"].slope < 0 and counts.detail[f]["post"].p_value == 1.0
    for f in (4, 5):
        assert counts.detail[f]["post"].slope > 0 and counts.detail[f]["pre"].p_value == 1.0


def test_count_significant_trends_relabel_invariant():
    perm = [3, 0, 4, 1, 2]
    base = analysis.count_significant_trends(trend_corpus(), split_year=1990, year_range=(1980, 1999))
    moved = analysis.count_significant_trends(trend_corpus(perm), split_year=1990, year_range=(1980, 1999))
    assert (moved.n_declining_pre, moved.n_rising_post) == (base.n_declining_pre, base.n_rising_post)
    for a in range(5):
        assert moved.detail[perm[a] + 1]["pre"].slope == pytest.approx(base.detail[a + 1]["pre"].slope, abs=1e-12)


def test_count_significant_trends_constant():
    rows = []
    for y in range(1980, 2000):
        rows += [(f"w{y}_{i}", y, 1, [0.5, 0.5, 0.0], [0.0]) for i in range(3)]
        rows += [(f"v{y}", y, 1, [0.0, 0.0, 1.0], [0.0])]
    counts = analysis.count_significant_trends(make_corpus(rows), split_year=1990, year_range=(1980, 1999))
    assert (counts.n_declining_pre, counts.n_rising_post) == (0, 0)


def test_count_significant_trends_pooled_mode():
    counts = analysis.count_significant_trends(trend_corpus(), split_year=1990, year_range=(1980, 1999),
                                               mode="pooled")
    assert counts.n_declining_pre <= 3 and counts.n_rising_post <= 2


def test_classify_trends_direct():
    series = {
        "down": [(y, 5 - 0.1 * y) for y in range(10)] + [(y, 1.0) for y in range(10, 20)],
        "flat": [(y, 2.0) for y in range(20)],
    }
    counts = analysis.classify_trends(series, split_year=10)
    assert counts[:2] == (1, 0)


# --- term prevalence ------------------------------------------------------

def trow(year, nwork, nidr, pct=None):
    return TermCountRow(year, nwork, (nwork,) * 4, nidr, (nidr,) * 4,
                        pct, (pct,) * 4)


def test_idr_share_basic():
    out = analysis.idr_share_series([trow(2001, 50, 50, 100.0), trow(2000, 50, 0, 0.0), trow(2002, 50, 5, 10.0)])
    assert out["all"] == [(2000, 0.0), (2001, 100.0), (2002, 10.0)]
    assert out["domain3"] == out["all"]


def test_idr_share_inconsistent():
    with pytest.raises(InconsistentRowError):
        analysis.idr_share_series([trow(2000, 5, 6)])
    with pytest.raises(InconsistentRowError):
        analysis.idr_share_series([trow(2000, 50, 5, 10.1)])


def test_idr_share_zero_total_is_gap():
    out = analysis.idr_share_series([trow(2000, 0, 0)])
    assert out["all"] == []
