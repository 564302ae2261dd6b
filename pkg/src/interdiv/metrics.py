"""Distances, diversity indices and contribution shares.

Pure functions with no I/O. Scalar helpers (``jaccard_distance``,
``publication_interdisciplinarity``, ``rao_stirling``) work on a single
profile; the ``*_from_scores`` functions run over whole year slices through
the active kernel backend (see :mod:`interdiv.kernels`).

All floating-point sums are exactly rounded, so every result is independent
of the order in which publications or fields are supplied.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from math import fsum

import numpy as np

from interdiv import kernels
from interdiv.errors import (
    EmptyProfileError,
    InvalidDiversityError,
    InvalidInputError,
    UndefinedDistanceError,
)

logger = logging.getLogger(__name__)

PROFILE_SUM_TOL = 1e-12


class ShareAxis(str, enum.Enum):
    PER_FIELD = "per-field"  # each field row sums to 1 over SDGs
    PER_SDG = "per-sdg"  # each SDG column sums to 1 over fields

    def __str__(self):
        return self.value


def _frozen(values, dtype=np.float64):
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class AffinityProfile:
    """Relative abundances of one publication over the fields."""

    weights: np.ndarray

    def __post_init__(self):
        w = _frozen(self.weights)
        if w.ndim != 1 or w.size == 0:
            raise InvalidInputError("profile must be a non-empty vector")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise InvalidInputError("profile weights must be finite and non-negative")
        total = fsum(w.tolist())
        if abs(total - 1.0) > PROFILE_SUM_TOL:
            raise InvalidInputError(f"profile weights sum to {total!r}, not 1")
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return self.weights.size


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric field-distance matrix for one year.

    ``empty_pairs`` lists (a, b) index pairs, a < b, whose membership union was
    empty; those entries were set to 1.
    """

    entries: np.ndarray
    year: int | None = None
    empty_pairs: tuple = ()

    def __post_init__(self):
        d = _frozen(self.entries)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise InvalidInputError(f"distance matrix must be square, got shape {d.shape}")
        if not np.all(np.isfinite(d)) or np.any(d < 0) or np.any(d > 1):
            raise InvalidInputError("distance entries must lie in [0, 1]")
        if not np.array_equal(d, d.T):
            raise InvalidInputError("distance matrix is not symmetric")
        if np.any(np.diag(d) != 0):
            raise InvalidInputError("distance matrix diagonal must be 0")
        object.__setattr__(self, "entries", d)
        object.__setattr__(self, "empty_pairs", tuple(self.empty_pairs))

    @property
    def size(self):
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class ContributionAccumulator:
    """Citation-weighted SDG affinity mass, fields x SDGs."""

    cells: np.ndarray
    year: int | None = None

    def __post_init__(self):
        c = _frozen(self.cells)
        if c.ndim != 2:
            raise InvalidInputError("accumulator must be a 2-D array")
        if not np.all(np.isfinite(c)) or np.any(c < 0):
            raise InvalidInputError("accumulator cells must be finite and non-negative")
        object.__setattr__(self, "cells", c)


@dataclass(frozen=True, eq=False)
class ShareMatrix:
    """Contribution shares normalized along ``axis``.

    ``flagged`` holds the zero-based row (per-field) or column (per-sdg)
    indices whose total mass was zero; those slices are all-zero.
    """

    shares: np.ndarray
    axis: ShareAxis
    year: int | None = None
    flagged: tuple = field(default=())


def _as_profile(profile):
    return profile if isinstance(profile, AffinityProfile) else AffinityProfile(profile)


def _as_matrix(d):
    return d if isinstance(d, DistanceMatrix) else DistanceMatrix(d)


def normalize_affinities(raw):
    """Turn raw affinity scores into relative abundances.

    Raises :class:`EmptyProfileError` when no score is positive; callers skip
    such publications.
    """
    raw = np.asarray(raw, dtype=np.float64)
    if raw.ndim != 1:
        raise InvalidInputError("raw scores must be a vector")
    if np.any(raw < 0) or not np.all(np.isfinite(raw)):
        raise InvalidInputError("raw scores must be finite and non-negative")
    total = fsum(raw.tolist())
    if total <= 0.0:
        raise EmptyProfileError("empty profile: no positive affinity score")
    return AffinityProfile(raw / total)


def jaccard_distance(members_a, members_b):
    a, b = set(members_a), set(members_b)
    union = len(a | b)
    if union == 0:
        raise UndefinedDistanceError("undefined distance: both membership sets are empty")
    return 1.0 - len(a & b) / union


def distance_matrix_from_counts(counts, year=None):
    """Jaccard distances from a co-occurrence count matrix (diagonal = set sizes)."""
    counts = np.asarray(counts, dtype=np.int64)
    sizes = np.diag(counts)
    union = sizes[:, None] + sizes[None, :] - counts
    entries = np.ones(counts.shape)
    nonempty = union > 0
    entries[nonempty] = 1.0 - counts[nonempty] / union[nonempty]
    np.fill_diagonal(entries, 0.0)
    empty = [(int(a), int(b)) for a, b in zip(*np.nonzero(~nonempty)) if a < b]
    if empty:
        logger.info("year %s: %d field pair(s) with empty membership union set to distance 1",
                    year, len(empty))
    return DistanceMatrix(entries, year=year, empty_pairs=tuple(empty))


def distance_matrix_from_scores(field_scores, year=None):
    """Jaccard distance matrix over strictly positive field memberships."""
    scores = np.asarray(field_scores, dtype=np.float64)
    if scores.ndim != 2:
        raise InvalidInputError("field scores must be an (n_publications, n_fields) array")
    counts = kernels.backend().cooccurrence(scores > 0.0)
    return distance_matrix_from_counts(counts, year=year)


def build_distance_matrix(year_slice):
    """Distance matrix for one deduplicated year slice (anything with ``field_scores``)."""
    if len(year_slice) == 0:
        raise InvalidInputError("cannot build a distance matrix from an empty slice")
    return distance_matrix_from_scores(year_slice.field_scores, year=getattr(year_slice, "year", None))


def rao_stirling(profile, d):
    """Quadratic diversity: sum over field pairs of p_a p_b d_ab."""
    p = _as_profile(profile).weights
    dm = _as_matrix(d).entries
    if dm.shape[0] != p.size:
        raise InvalidInputError(f"profile has {p.size} fields but matrix is {dm.shape[0]}x{dm.shape[0]}")
    idx = np.flatnonzero(p)
    q = p[idx]
    return fsum((np.outer(q, q) * dm[np.ix_(idx, idx)]).ravel().tolist())


def effective_number(rs):
    """Effective number of disciplines for a quadratic diversity value."""
    if not rs < 1.0 or rs < 0.0:
        raise InvalidDiversityError(f"invalid diversity argument: {rs!r} outside [0, 1)")
    return 1.0 / (1.0 - rs)


def publication_interdisciplinarity(profile, d):
    """Effective number of disciplines of one publication, in [1, n_fields]."""
    return effective_number(rao_stirling(profile, d))


def publication_deltas(field_scores, d):
    """Per-publication indices for a whole slice.

    Returns ``(deltas, valid)``; rows whose field scores are all zero are
    skipped (``valid`` False, delta NaN).
    """
    k = kernels.backend()
    dm = _as_matrix(d).entries
    weights, valid = k.normalize_rows(np.asarray(field_scores, dtype=np.float64))
    rs = k.quadratic_entropy(weights, dm)
    if np.any(rs[valid] >= 1.0):
        raise InvalidDiversityError("invalid diversity argument in slice")
    deltas = np.full(rs.shape, np.nan)
    deltas[valid] = 1.0 / (1.0 - rs[valid])
    n_skipped = int((~valid).sum())
    if n_skipped:
        logger.debug("skipped %d publication(s) with all-zero field scores", n_skipped)
    return deltas, valid


def sdg_mass_from_scores(field_scores, citations, sdg_scores, year=None):
    field_scores = np.asarray(field_scores, dtype=np.float64)
    sdg_scores = np.asarray(sdg_scores, dtype=np.float64)
    cells = kernels.backend().weighted_mass(
        field_scores > 0.0, np.asarray(citations, dtype=np.float64), sdg_scores
    )
    return ContributionAccumulator(cells, year=year)


def accumulate_sdg_mass(year_slice, n_fields=None, n_sdgs=None):
    """Citation-weighted SDG mass per (field, SDG) for one year slice.

    An empty slice yields an all-zero accumulator; ``n_fields``/``n_sdgs``
    default to the slice's column counts.
    """
    fs = np.asarray(year_slice.field_scores, dtype=np.float64)
    ss = np.asarray(year_slice.sdg_scores, dtype=np.float64)
    if n_fields is not None:
        fs = fs.reshape(-1, n_fields)
    if n_sdgs is not None:
        ss = ss.reshape(-1, n_sdgs)
    return sdg_mass_from_scores(fs, year_slice.citations, ss, year=getattr(year_slice, "year", None))


def contribution_shares(acc, axis=ShareAxis.PER_SDG):
    axis = ShareAxis(axis)
    cells = acc.cells
    shares = np.zeros(cells.shape)
    flagged = []
    if axis is ShareAxis.PER_FIELD:
        for a in range(cells.shape[0]):
            total = fsum(cells[a].tolist())
            if total > 0.0:
                shares[a] = cells[a] / total
            else:
                flagged.append(a)
    else:
        for m in range(cells.shape[1]):
            total = fsum(cells[:, m].tolist())
            if total > 0.0:
                shares[:, m] = cells[:, m] / total
            else:
                flagged.append(m)
    shares.setflags(write=False)
    return ShareMatrix(shares, axis, year=acc.year, flagged=tuple(flagged))
