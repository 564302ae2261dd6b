"""Publication records: loading, validation, deduplication and slicing.

A :class:`Corpus` stores records column-wise (numpy arrays) so the metric
kernels can consume a year slice without copying row objects; iterating it
yields :class:`PublicationRecord` values.
"""
from __future__ import annotations

import csv
import io
import logging
import math
import os
from dataclasses import dataclass

import numpy as np

from interdiv.errors import ParseError, RangeError, SchemaError
from interdiv.taxonomy import FIELDS, N_DOMAINS, N_FIELDS, N_SDGS

logger = logging.getLogger(__name__)

CORPUS_HEADER = (
    ["idwork", "pyear", "citation"]
    + [f"discip{k}" for k in range(1, N_FIELDS + 1)]
    + [f"SDG{m}" for m in range(1, N_SDGS + 1)]
)

_DOMAIN_NUMS = range(1, N_DOMAINS + 1)
TERM_COUNT_HEADER = (
    ["pyear", "nwork"]
    + [f"nwork{a}" for a in _DOMAIN_NUMS]
    + ["nIDR"]
    + [f"nIDR{a}" for a in _DOMAIN_NUMS]
    + ["%nIDR"]
    + [f"%nIDR{a}" for a in _DOMAIN_NUMS]
)


@dataclass(frozen=True)
class PublicationRecord:
    work_id: str
    year: int
    citations: int
    field_scores: tuple
    sdg_scores: tuple


class Corpus:
    """Column-oriented, read-only collection of publication records."""

    def __init__(self, work_ids, years, citations, field_scores, sdg_scores, raw_lines=None):
        self.work_ids = tuple(str(w) for w in work_ids)
        n = len(self.work_ids)
        self.years = _ro(np.asarray(years, dtype=np.int64).reshape(n))
        self.citations = _ro(np.asarray(citations, dtype=np.int64).reshape(n))
        self.field_scores = _ro(_as_2d(field_scores, n, N_FIELDS))
        self.sdg_scores = _ro(_as_2d(sdg_scores, n, N_SDGS))
        # original CSV lines, kept so unmodified records write back byte-identically
        self.raw_lines = None if raw_lines is None else tuple(raw_lines)

    @classmethod
    def from_records(cls, records, n_fields=N_FIELDS, n_sdgs=N_SDGS):
        if isinstance(records, Corpus):
            return records
        records = list(records)
        return cls(
            [r.work_id for r in records],
            [r.year for r in records],
            [r.citations for r in records],
            np.array([r.field_scores for r in records], dtype=np.float64).reshape(len(records), n_fields),
            np.array([r.sdg_scores for r in records], dtype=np.float64).reshape(len(records), n_sdgs),
        )

    @property
    def n_fields(self):
        return self.field_scores.shape[1]

    @property
    def n_sdgs(self):
        return self.sdg_scores.shape[1]

    def __len__(self):
        return len(self.work_ids)

    def __iter__(self):
        for i in range(len(self)):
            yield self.record(i)

    def __getitem__(self, i):
        return self.record(i)

    def record(self, i):
        return PublicationRecord(
            self.work_ids[i],
            int(self.years[i]),
            int(self.citations[i]),
            tuple(self.field_scores[i].tolist()),
            tuple(self.sdg_scores[i].tolist()),
        )

    def take(self, indices, cls=None, **extra):
        idx = np.asarray(indices, dtype=np.int64)
        cls = cls or Corpus
        out = cls.__new__(cls)
        Corpus.__init__(
            out,
            [self.work_ids[i] for i in idx],
            self.years[idx],
            self.citations[idx],
            self.field_scores[idx],
            self.sdg_scores[idx],
            None if self.raw_lines is None else [self.raw_lines[i] for i in idx],
        )
        for key, value in extra.items():
            setattr(out, key, value)
        return out

    def distinct_years(self):
        return sorted(int(y) for y in np.unique(self.years))


class YearSlice(Corpus):
    """Deduplicated records of a single publication year."""

    year: int


def _ro(arr):
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


def _as_2d(values, n, default_width):
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        width = arr.shape[1] if arr.ndim == 2 else default_width
        return np.zeros((n, width))
    return arr.reshape(n, -1)


def _column(field, n_fields):
    """Zero-based column for a 1-based field number or a field name."""
    if isinstance(field, str):
        key = field.strip()
        if key.isdigit():
            return _column(int(key), n_fields)
        names = [name.casefold() for name in FIELDS]
        if key.casefold() not in names:
            raise KeyError(f"unknown field {field!r}")
        return names.index(key.casefold())
    n = int(field)
    if not 1 <= n <= n_fields:
        raise KeyError(f"field number {n} outside 1..{n_fields}")
    return n - 1


# --- CSV ------------------------------------------------------------------

def _split_lines(text):
    """Split file text into lines, remembering the terminator and trailing newline."""
    newline = "\r\n" if "\r\n" in text else "\n"
    trailing = text.endswith(newline)
    body = text[: -len(newline)] if trailing else text
    lines = body.split(newline) if body else []
    return lines, newline, trailing


def _parse_score(cell, row, column):
    if cell == "":
        raise ParseError(f"parse error: empty cell in column {column} at row {row}", row)
    try:
        value = float(cell)
    except ValueError:
        raise ParseError(f"parse error: {cell!r} in column {column} at row {row} is not a number", row) from None
    if not (0.0 <= value <= 1.0):
        raise RangeError(f"range error: {column}={cell} at row {row} outside [0, 1]")
    return value


def _parse_int(cell, row, column):
    if cell == "":
        raise ParseError(f"parse error: empty cell in column {column} at row {row}", row)
    try:
        return int(cell)
    except ValueError:
        pass
    try:
        value = float(cell)
    except ValueError:
        value = math.nan
    if not value.is_integer():
        raise ParseError(f"parse error: {cell!r} in column {column} at row {row} is not an integer", row)
    return int(value)


def _check_header(found, expected):
    for position, want in enumerate(expected):
        got = found[position] if position < len(found) else None
        if got != want:
            shown = "missing" if got is None else repr(got)
            raise SchemaError(f"schema error: column {position + 1} should be {want!r}, found {shown}")
    if len(found) > len(expected):
        raise SchemaError(f"schema error: unexpected extra column {found[len(expected)]!r}")


class CorpusFile(Corpus):
    """A corpus loaded from disk, carrying what is needed for exact write-back."""

    preamble: tuple = ()
    newline: str = "\n"
    trailing_newline: bool = True


def load_corpus_csv(path):
    """Load a corpus in the ``idwork,pyear,citation,discip1..19,SDG1..17`` schema.

    Leading ``#`` lines (metadata headers written by this package) are
    skipped. Empty cells are parse errors, never zeros.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    if text.startswith("﻿"):
        text = text[1:]
    lines, newline, trailing = _split_lines(text)
    preamble = []
    while lines and lines[0].startswith("#"):
        preamble.append(lines.pop(0))
    if not lines:
        raise SchemaError("schema error: missing header row")
    header_row = len(preamble) + 1
    _check_header(next(csv.reader([lines[0]])), CORPUS_HEADER)

    n_cols = len(CORPUS_HEADER)
    ids, years, cites, fields, sdgs, raw = [], [], [], [], [], []
    for offset, line in enumerate(lines[1:]):
        row = header_row + 1 + offset
        cells = line.split(",") if '"' not in line else next(csv.reader([line]))
        if len(cells) != n_cols:
            raise ParseError(f"parse error: row {row} has {len(cells)} cells, expected {n_cols}", row)
        work_id = cells[0].strip()
        if not work_id:
            raise ParseError(f"parse error: empty idwork at row {row}", row)
        year = _parse_int(cells[1], row, "pyear")
        citations = _parse_int(cells[2], row, "citation")
        if citations < 0:
            raise RangeError(f"range error: negative citation count at row {row}")
        fs = [_parse_score(c, row, CORPUS_HEADER[3 + j]) for j, c in enumerate(cells[3 : 3 + N_FIELDS])]
        ss = [_parse_score(c, row, CORPUS_HEADER[3 + N_FIELDS + j]) for j, c in enumerate(cells[3 + N_FIELDS :])]
        ids.append(work_id)
        years.append(year)
        cites.append(citations)
        fields.append(fs)
        sdgs.append(ss)
        raw.append(line)

    corpus = CorpusFile(ids, years, cites, np.array(fields).reshape(-1, N_FIELDS),
                        np.array(sdgs).reshape(-1, N_SDGS), raw_lines=raw)
    corpus.preamble = tuple(preamble)
    corpus.newline = newline
    corpus.trailing_newline = trailing
    corpus.header_line = lines[0]
    logger.info("loaded %d records from %s", len(corpus), path)
    return corpus


def format_record(record):
    return ",".join(
        [record.work_id, str(record.year), str(record.citations)]
        + [repr(float(x)) for x in record.field_scores]
        + [repr(float(x)) for x in record.sdg_scores]
    )


def corpus_to_text(corpus, meta_line=None):
    """Serialize a corpus; records loaded from a file reuse their original lines."""
    newline = getattr(corpus, "newline", "\n")
    lines = []
    if meta_line is not None:
        lines.append(meta_line)
    else:
        lines.extend(getattr(corpus, "preamble", ()))
    lines.append(getattr(corpus, "header_line", ",".join(CORPUS_HEADER)))
    if corpus.raw_lines is not None:
        lines.extend(corpus.raw_lines)
    else:
        lines.extend(format_record(r) for r in corpus)
    text = newline.join(lines)
    if getattr(corpus, "trailing_newline", True):
        text += newline
    return text


def write_corpus_csv(corpus, path, meta_line=None):
    atomic_write_text(path, corpus_to_text(corpus, meta_line))


def atomic_write_text(path, text):
    path = os.fspath(path)
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


# --- corpus operations ----------------------------------------------------

def deduplicate(records):
    """Keep the first occurrence of each work id.

    Returns ``(corpus, n_duplicates)``.
    """
    corpus = Corpus.from_records(records)
    seen = set()
    keep = []
    for i, work_id in enumerate(corpus.work_ids):
        if work_id not in seen:
            seen.add(work_id)
            keep.append(i)
    dropped = len(corpus) - len(keep)
    if dropped:
        logger.debug("dropped %d duplicate record(s)", dropped)
    if dropped == 0 and type(corpus) is Corpus:
        return corpus, 0
    return corpus.take(keep), dropped


def slice_by_year(records, year):
    """Deduplicated records of one year; an absent year gives an empty slice."""
    corpus = Corpus.from_records(records)
    year = int(year)
    idx = np.flatnonzero(corpus.years == year)
    seen = set()
    keep = []
    for i in idx:
        work_id = corpus.work_ids[i]
        if work_id not in seen:
            seen.add(work_id)
            keep.append(i)
    return corpus.take(keep, cls=YearSlice, year=year, n_duplicates=len(idx) - len(keep))


def restrict_years(records, start, end):
    """Records with ``start <= year <= end``; returns ``(corpus, n_ignored)``."""
    corpus = Corpus.from_records(records)
    mask = (corpus.years >= start) & (corpus.years <= end)
    ignored = int((~mask).sum())
    if ignored:
        logger.info("ignored %d record(s) outside %d-%d", ignored, start, end)
    return corpus.take(np.flatnonzero(mask)), ignored


def select_top_cited(records, field, year, n):
    """The ``n`` most-cited deduplicated records of ``year`` positive in ``field``.

    Ties are broken by work id ascending, so the result does not depend on
    input order. ``field`` is a 1-based field number or a field name.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    pool = slice_by_year(records, year)
    col = _column(field, pool.n_fields)
    idx = np.flatnonzero(pool.field_scores[:, col] > 0.0)
    order = sorted(idx, key=lambda i: (-int(pool.citations[i]), pool.work_ids[i]))
    return pool.take(order[:n])


@dataclass(frozen=True)
class Memberships:
    fields: tuple  # frozensets of work ids, one per field
    sdgs: tuple  # frozensets of work ids, one per SDG


def membership_sets(year_slice):
    ids = year_slice.work_ids
    fields = tuple(
        frozenset(ids[i] for i in np.flatnonzero(year_slice.field_scores[:, a] > 0.0))
        for a in range(year_slice.n_fields)
    )
    sdgs = tuple(
        frozenset(ids[i] for i in np.flatnonzero(year_slice.sdg_scores[:, m] > 0.0))
        for m in range(year_slice.n_sdgs)
    )
    return Memberships(fields, sdgs)


# --- term counts ----------------------------------------------------------

@dataclass(frozen=True)
class TermCountRow:
    """One year of term-prevalence counts; percentages are as stored (None if blank)."""

    year: int
    nwork: int
    nwork_domain: tuple
    nidr: int
    nidr_domain: tuple
    pct: float | None = None
    pct_domain: tuple = (None,) * N_DOMAINS

    def pairs(self):
        """(label, count, total, stored_pct) for overall then each domain."""
        yield "all", self.nidr, self.nwork, self.pct
        for a in range(len(self.nwork_domain)):
            yield f"domain{a + 1}", self.nidr_domain[a], self.nwork_domain[a], self.pct_domain[a]


_MISSING = {"", "na", "nan", "n/a", "null"}


def _parse_pct(cell, row, column):
    if cell.strip().lower() in _MISSING:
        return None
    try:
        return float(cell)
    except ValueError:
        raise ParseError(f"parse error: {cell!r} in column {column} at row {row}", row) from None


def load_term_counts_csv(path):
    with open(path, encoding="utf-8-sig", newline="") as fh:
        lines = [line for line in fh.read().splitlines() if not line.startswith("#")]
    if not lines:
        raise SchemaError("schema error: missing header row")
    reader = csv.reader(lines)
    _check_header(next(reader), TERM_COUNT_HEADER)
    rows = []
    for offset, cells in enumerate(reader):
        row = offset + 2
        if not cells:
            continue
        if len(cells) != len(TERM_COUNT_HEADER):
            raise ParseError(f"parse error: row {row} has {len(cells)} cells", row)
        ints = [_parse_int(c, row, TERM_COUNT_HEADER[j]) for j, c in enumerate(cells[:11])]
        pcts = [_parse_pct(c, row, TERM_COUNT_HEADER[11 + j]) for j, c in enumerate(cells[11:])]
        rows.append(TermCountRow(
            year=ints[0], nwork=ints[1], nwork_domain=tuple(ints[2:6]),
            nidr=ints[6], nidr_domain=tuple(ints[7:11]),
            pct=pcts[0], pct_domain=tuple(pcts[1:]),
        ))
    return rows


def term_counts_to_text(rows, meta_line=None):
    buf = io.StringIO()
    if meta_line is not None:
        buf.write(meta_line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TERM_COUNT_HEADER)
    for r in rows:
        pct = [r.pct, *r.pct_domain]
        writer.writerow(
            [r.year, r.nwork, *r.nwork_domain, r.nidr, *r.nidr_domain]
            + ["" if p is None else f"{p:.12g}" for p in pct]
        )
    return buf.getvalue()
