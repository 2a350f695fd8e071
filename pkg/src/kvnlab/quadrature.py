"""Gauss-Legendre rules: fixed composite panels and adaptive bisection."""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import ResolutionError

#: largest node count a composite rule may request
MAX_NODES = 10_000


@lru_cache(maxsize=None)
def _legendre(order: int):
    return np.polynomial.legendre.leggauss(order)


def composite_nodes(lo: float, hi: float, n_panels: int, order: int = 16):
    """Nodes and weights of ``n_panels`` equal panels of ``order`` points."""
    x, w = _legendre(order)
    edges = np.linspace(lo, hi, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x).ravel()
    weights = (half[:, None] * w).ravel()
    return nodes, weights


def oscillatory_nodes(lo: float, hi: float, max_freq: float, per_wavelength: int = 16,
                      order: int = 16):
    """Composite rule with at least ``per_wavelength`` nodes per shortest wavelength.

    ``max_freq`` bounds |d phase / dx| of the integrand over [lo, hi].
    """
    wavelengths = (hi - lo) * max_freq / (2 * math.pi)
    n_nodes = max(order, math.ceil(wavelengths * per_wavelength))
    n_panels = math.ceil(n_nodes / order)
    if n_panels * order > MAX_NODES:
        raise ResolutionError(
            f"oscillatory integrand needs {n_panels * order} nodes (> {MAX_NODES}); "
            "shorten the interval or lengthen the time step")
    return composite_nodes(lo, hi, n_panels, order)


def adaptive_gauss_legendre(f, lo: float, hi: float, rtol: float = 1e-10,
                            atol: float = 1e-300, order: int = 10, max_depth: int = 40) -> float:
    """Integrate f over [lo, hi] by bisection until halves agree with the whole.

    ``f`` must accept a numpy array of abscissae.
    """
    x, w = _legendre(order)

    def rule(a, b):
        h = 0.5 * (b - a)
        return h * np.dot(w, f(0.5 * (a + b) + h * x))

    def recurse(a, b, whole, depth):
        m = 0.5 * (a + b)
        left, right = rule(a, m), rule(m, b)
        both = left + right
        if abs(both - whole) <= max(rtol * abs(both), atol) or depth >= max_depth:
            return both
        return recurse(a, m, left, depth + 1) + recurse(m, b, right, depth + 1)

    if hi == lo:
        return 0.0
    return recurse(lo, hi, rule(lo, hi), 0)
