"""Pure-Python/numpy kernels; drop-in fallback for the compiled ``_ckernels``.

All sums are exactly rounded (``math.fsum``) so the result of every kernel is
independent of row and column order and matches the compiled backend bit for
bit.
"""
from math import fsum

import numpy as np

NAME = "python"


def normalize_rows(raw):
    raw = np.ascontiguousarray(raw, dtype=np.float64)
    n, k = raw.shape
    weights = np.zeros((n, k))
    valid = np.zeros(n, dtype=bool)
    for i in range(n):
        row = raw[i]
        total = fsum(row.tolist())
        if total > 0.0:
            weights[i] = row / total
            valid[i] = True
    return weights, valid


def cooccurrence(positive):
    pos = np.ascontiguousarray(positive, dtype=np.int64)
    return pos.T @ pos


def quadratic_entropy(weights, dist):
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    dist = np.ascontiguousarray(dist, dtype=np.float64)
    out = np.zeros(weights.shape[0])
    for i, row in enumerate(weights):
        idx = np.flatnonzero(row)
        if idx.size < 2:
            continue
        p = row[idx]
        terms = np.outer(p, p) * dist[np.ix_(idx, idx)]
        out[i] = fsum(terms.ravel().tolist())
    return out


def weighted_mass(positive, weights, scores):
    pos = np.asarray(positive, dtype=bool)
    weights = np.asarray(weights, dtype=np.float64)
    scores = np.asarray(scores, dtype=np.float64)
    prod = weights[:, None] * np.where(scores > 0.0, scores, 0.0)
    k, s = pos.shape[1], scores.shape[1]
    out = np.zeros((k, s))
    for a in range(k):
        sel = prod[pos[:, a]]
        if sel.shape[0] == 0:
            continue
        for m in range(s):
            out[a, m] = fsum(sel[:, m].tolist())
    return out
