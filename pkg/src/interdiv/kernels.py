"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
numpy fallback ``_pykernels`` is used. Setting ``INTERDIV_PURE_PYTHON=1``
forces the fallback. Both expose the same four functions:

``normalize_rows(raw) -> (weights, valid)``
    Row-normalize raw scores; all-zero rows stay zero and are marked invalid.
``cooccurrence(positive) -> counts``
    ``counts[a, b]`` is the number of rows positive in both columns a and b.
``quadratic_entropy(weights, dist) -> values``
    Per row, the sum over a, b of ``w_a * w_b * d_ab``.
``weighted_mass(positive, weights, scores) -> mass``
    ``mass[a, m]`` sums ``weights_i * scores_im`` over rows positive in column
    a with ``scores_im > 0``.
"""
import contextlib
import os

from interdiv import _pykernels

try:
    from interdiv import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

if _ckernels is not None and not os.environ.get("INTERDIV_PURE_PYTHON"):
    _active = _ckernels
else:
    _active = _pykernels


def available():
    return sorted(_BACKENDS)


def backend():
    """The active kernel module."""
    return _active


def get(name):
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} not available; have {available()}") from None


@contextlib.contextmanager
def use(name):
    """Temporarily switch the active backend (not thread-safe; for tests and benchmarks)."""
    global _active
    previous = _active
    _active = get(name)
    try:
        yield _active
    finally:
        _active = previous
