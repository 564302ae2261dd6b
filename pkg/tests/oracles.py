"""Brute-force reference computations, deliberately independent of interdiv's code paths.

Plain Python loops and set operations only: no numpy, no kernels.
"""


def jaccard_by_enumeration(rows, a, b):
    """rows: list of per-publication score lists. None if the union is empty."""
    in_a = {i for i, r in enumerate(rows) if r[a] > 0}
    in_b = {i for i, r in enumerate(rows) if r[b] > 0}
    union = in_a | in_b
    if not union:
        return None
    return 1 - len(in_a & in_b) / len(union)


def distance_matrix_by_enumeration(rows, k):
    out = []
    for a in range(k):
        line = []
        for b in range(k):
            if a == b:
                line.append(0.0)
                continue
            d = jaccard_by_enumeration(rows, a, b)
            line.append(1.0 if d is None else d)
        out.append(line)
    return out


def double_sum(p, d):
    total = 0.0
    for a in range(len(p)):
        for b in range(len(p)):
            total += p[a] * p[b] * d[a][b]
    return total


def delta_by_double_sum(raw, d):
    s = sum(raw)
    p = [x / s for x in raw]
    return 1.0 / (1.0 - double_sum(p, d))


def sdg_mass_by_enumeration(pubs, k, n_sdgs):
    """pubs: list of (citations, field_scores, sdg_scores)."""
    cells = [[0.0] * n_sdgs for _ in range(k)]
    for c, fs, ss in pubs:
        for a in range(k):
            if fs[a] <= 0:
                continue
            for m in range(n_sdgs):
                if ss[m] > 0:
                    cells[a][m] += c * ss[m]
    return cells
