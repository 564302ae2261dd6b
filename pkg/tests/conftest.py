import os

import numpy as np
import pytest

from interdiv import kernels
from interdiv.corpus import Corpus


@pytest.fixture(params=kernels.available())
def backend(request):
    """Run the test once per available kernel backend."""
    with kernels.use(request.param) as mod:
        yield mod


def make_corpus(rows, n_fields=None, n_sdgs=None):
    """rows: (work_id, year, citations, field_scores, sdg_scores)."""
    rows = list(rows)
    if n_fields is None:
        n_fields = len(rows[0][3]) if rows else 19
    if n_sdgs is None:
        n_sdgs = len(rows[0][4]) if rows else 17
    return Corpus(
        [r[0] for r in rows],
        [r[1] for r in rows],
        [r[2] for r in rows],
        np.array([r[3] for r in rows], dtype=float).reshape(len(rows), n_fields),
        np.array([r[4] for r in rows], dtype=float).reshape(len(rows), n_sdgs),
    )


def unit(k, *positions, value=1.0):
    v = [0.0] * k
    for p in positions:
        v[p] = value
    return v


FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
