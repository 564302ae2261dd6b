"""Compiled and fallback kernels must agree bit for bit."""
import os

import numpy as np
import pytest

from interdiv import _pykernels, kernels

cython = pytest.importorskip("interdiv._ckernels")


@pytest.fixture
def data():
    rng = np.random.default_rng(7)
    n, k, s = 400, 19, 17
    raw = rng.random((n, k)) * (rng.random((n, k)) < 0.25)
    raw[::37] = 0.0
    d = rng.random((k, k))
    d = np.triu(d, 1)
    d = d + d.T
    sdg = rng.random((n, s)) * (rng.random((n, s)) < 0.2)
    cites = rng.integers(0, 5000, n).astype(float)
    return raw, d, sdg, cites


def test_backends_listed():
    assert set(kernels.available()) == {"python", "cython"}
    # compiled core is preferred when present, unless the fallback is forced
    expected = _pykernels if os.environ.get("INTERDIV_PURE_PYTHON") else cython
    assert kernels.backend() is expected


def test_normalize_rows_identical(data):
    raw = data[0]
    wp, vp = _pykernels.normalize_rows(raw)
    wc, vc = cython.normalize_rows(raw)
    assert np.array_equal(wp, wc) and np.array_equal(vp, vc)


def test_cooccurrence_identical(data):
    pos = data[0] > 0
    assert np.array_equal(_pykernels.cooccurrence(pos), cython.cooccurrence(pos))


def test_quadratic_entropy_identical(data):
    raw, d = data[0], data[1]
    w, _ = _pykernels.normalize_rows(raw)
    assert np.array_equal(_pykernels.quadratic_entropy(w, d), cython.quadratic_entropy(w, d))


def test_weighted_mass_identical(data):
    raw, _, sdg, cites = data
    pos = raw > 0
    assert np.array_equal(_pykernels.weighted_mass(pos, cites, sdg), cython.weighted_mass(pos, cites, sdg))


def test_exact_summation_is_order_independent():
    # terms chosen so naive left-to-right summation depends on order
    w = np.array([[1e-17, 0.5, 0.5 - 1e-17]])
    d = np.array([[0, 1, 1], [1, 0, 1], [1, 1, 0.0]])
    perm = [2, 0, 1]
    for mod in (_pykernels, cython):
        a = mod.quadratic_entropy(w, d)[0]
        b = mod.quadratic_entropy(w[:, perm], d[np.ix_(perm, perm)])[0]
        assert a == b


def test_use_restores_backend():
    before = kernels.backend()
    with kernels.use("python") as mod:
        assert kernels.backend() is mod is _pykernels
    assert kernels.backend() is before
    with pytest.raises(ValueError):
        kernels.get("fortran")
