"""Picks the compiled kernels when importable, else the numpy fallback.

Set ``KVNLAB_PURE_PYTHON=1`` to force the fallback and ``KVNLAB_THREADS``
to cap how many threads the compiled kernels are split across.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy import ndimage

from . import _kernels_py

_compiled = None
if not os.environ.get("KVNLAB_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"


def threads() -> int:
    env = os.environ.get("KVNLAB_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _module(backend: str | None):
    backend = backend or BACKEND
    if backend == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        return _compiled
    if backend == "python":
        return _kernels_py
    raise ValueError(f"unknown backend {backend!r}")


def _split(n: int, parts: int):
    edges = np.linspace(0, n, parts + 1).astype(int)
    return [slice(lo, hi) for lo, hi in zip(edges[:-1], edges[1:]) if hi > lo]


def _pointwise(fn, arrays, extra, n_threads):
    n = len(arrays[0])
    if n_threads <= 1 or n < 4096:
        return fn(*arrays, *extra)
    chunks = _split(n, n_threads)
    with ThreadPoolExecutor(n_threads) as pool:
        parts = list(pool.map(lambda sl: fn(*(a[sl] for a in arrays), *extra), chunks))
    if isinstance(parts[0], tuple):
        return tuple(np.concatenate(col) for col in zip(*parts))
    return np.concatenate(parts)


def spline_coefficients(data: np.ndarray) -> np.ndarray:
    """Cubic B-spline coefficients with mirror boundaries along both axes."""
    data = np.asarray(data, dtype=complex)
    out = np.empty_like(data)
    for part, attr in ((np.real, "real"), (np.imag, "imag")):
        c = ndimage.spline_filter1d(part(data), order=3, axis=0, mode="mirror")
        c = ndimage.spline_filter1d(c, order=3, axis=1, mode="mirror")
        setattr(out, attr, c)
    return np.ascontiguousarray(out)


def sample(data: np.ndarray, fq: np.ndarray, fs: np.ndarray, method: str = "bicubic",
           backend: str | None = None, coef: np.ndarray | None = None) -> np.ndarray:
    """Interpolate ``data`` at fractional node indices; outside the grid -> 0."""
    mod = _module(backend)
    shape = np.shape(fq)
    fq = np.ascontiguousarray(np.ravel(fq), dtype=float)
    fs = np.ascontiguousarray(np.ravel(fs), dtype=float)
    if method == "bicubic":
        table = spline_coefficients(data) if coef is None else coef
        fn = mod.sample_bicubic
    elif method == "bilinear":
        table = np.ascontiguousarray(data, dtype=complex)
        fn = mod.sample_bilinear
    else:
        raise ValueError(f"unknown interpolation {method!r}")
    n_threads = threads() if mod is _compiled else 1
    out = _pointwise(lambda a, b: fn(table, a, b), (fq, fs), (), n_threads)
    return out.reshape(shape)


def backward_flow_quadratic(q, p, t, m, k, nsteps, backend: str | None = None):
    mod = _module(backend)
    shape = np.shape(q)
    q = np.ascontiguousarray(np.ravel(q), dtype=float)
    p = np.ascontiguousarray(np.ravel(p), dtype=float)
    n_threads = threads() if mod is _compiled else 1
    qb, pb = _pointwise(mod.backward_flow_quadratic, (q, p), (t, m, k, nsteps), n_threads)
    return qb.reshape(shape), pb.reshape(shape)


def chirp_sum(x_out, x_nodes, w_nodes, c, backend: str | None = None):
    mod = _module(backend)
    x_out = np.ascontiguousarray(x_out, dtype=float)
    x_nodes = np.ascontiguousarray(x_nodes, dtype=float)
    w_nodes = np.ascontiguousarray(w_nodes, dtype=complex)
    n_threads = threads() if mod is _compiled else 1
    return _pointwise(lambda xo: mod.chirp_sum(xo, x_nodes, w_nodes, c), (x_out,), (), n_threads)
