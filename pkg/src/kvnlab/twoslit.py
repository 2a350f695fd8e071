"""Classical (KvN) and quantum two-slit experiments on the x axis.

Motion along y is a known classical trajectory, so the beam reaches the
slit plate at t_F = y_F m/p_y0 and the screen at t_S = y_S m/p_y0. Only
the transverse x motion is treated as a wave function.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _backend
from .classical import evolve_free
from .core import GaussianParams, PhaseSpaceGrid, WaveFunction2D, gaussian_qp
from .errors import DomainError, GeometryWarning
from .quadrature import adaptive_gauss_legendre, oscillatory_nodes
from .quantum import QuantumParams, gaussian_free_closed_form

#: analysis window for quantum fringe counts (calibrated once, see golden sidecar)
FRINGE_WINDOW = (-19.0, 19.0)
#: relative amplitude a slit must receive at t_F
FLUX_FLOOR = 1e-6


class SlitsOpen(enum.Enum):
    BOTH = "both"
    ONLY_FIRST = "first"
    ONLY_SECOND = "second"


@dataclass(frozen=True)
class SlitGeometry:
    """Slits of half-width ``delta`` centred at +x_A (first) and -x_A (second)."""

    x_A: float
    delta: float
    y_F: float
    y_S: float
    p_y0: float = 1.0
    m: float = 1.0

    def __post_init__(self):
        if not (self.x_A > 0 and self.delta > 0 and self.p_y0 > 0 and self.m > 0):
            raise ValueError("x_A, delta, p_y0 and m must all be > 0")
        if not self.delta < self.x_A:
            raise ValueError(f"slits overlap: need delta < x_A, got delta={self.delta}, x_A={self.x_A}")
        if not 0 < self.y_F < self.y_S:
            raise ValueError(f"need 0 < y_F < y_S, got y_F={self.y_F}, y_S={self.y_S}")

    @property
    def t_F(self) -> float:
        return self.y_F * self.m / self.p_y0

    @property
    def t_S(self) -> float:
        return self.y_S * self.m / self.p_y0

    @property
    def abar(self) -> float:
        """Transverse displacement per unit momentum between plate and screen."""
        return (self.y_S - self.y_F) / self.p_y0

    def slits(self, open_: SlitsOpen = SlitsOpen.BOTH) -> list[tuple[float, float]]:
        first = (self.x_A - self.delta, self.x_A + self.delta)
        second = (-self.x_A - self.delta, -self.x_A + self.delta)
        return {SlitsOpen.BOTH: [first, second], SlitsOpen.ONLY_FIRST: [first],
                SlitsOpen.ONLY_SECOND: [second]}[open_]


def longitudinal_clock(geom: SlitGeometry) -> tuple[float, float]:
    return geom.t_F, geom.t_S


def cutoff(x, lo: float, hi: float) -> np.ndarray:
    """Half-open indicator of [lo, hi)."""
    x = np.asarray(x)
    return ((x >= lo) & (x < hi)).astype(float)


def slit_mask(x, geom: SlitGeometry, open_: SlitsOpen = SlitsOpen.BOTH) -> np.ndarray:
    return sum(cutoff(x, lo, hi) for lo, hi in geom.slits(open_))


@dataclass(frozen=True, eq=False)
class ProbabilityCurve:
    """Screen density; ``raw`` keeps the unnormalized values."""

    x: np.ndarray
    P: np.ndarray
    raw: np.ndarray
    normalized: bool = True
    cross: np.ndarray | None = None
    warnings: tuple[str, ...] = field(default=())


def _trapz(y, x) -> float:
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(x)))


def _curve(x, raw, cross=None, notes=()) -> ProbabilityCurve:
    x = np.asarray(x, dtype=float)
    area = _trapz(raw, x) if len(x) > 1 else 0.0
    P = raw / area if area > 0 else raw.copy()
    return ProbabilityCurve(x, P, raw, area > 0, cross, tuple(notes))


def _merge(intervals):
    out = []
    for lo, hi in sorted(intervals):
        if out and lo <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return out


def momentum_windows(x: float, geom: SlitGeometry, open_: SlitsOpen = SlitsOpen.BOTH):
    """p_x intervals for which a particle reaching x at t_S passed an open slit."""
    ab = geom.abar
    if not ab > 1e-14:
        raise DomainError(f"degenerate plate-to-screen displacement abar={ab}")
    return _merge([((x - hi) / ab, (x - lo) / ab) for lo, hi in geom.slits(open_)])


def _flux_note(params: GaussianParams, geom: SlitGeometry) -> list[str]:
    # peak |psi| over p at each slit centre at t_F, relative to the global peak
    s = geom.t_F / geom.m
    a, b = params.a, params.b
    notes = []
    for xc in (geom.x_A, -geom.x_A):
        p = np.linspace(params.p_i - 10 * b, params.p_i + 10 * b, 4001)
        rel = np.exp(-(xc - p * s)**2 / (2 * a * a) - (p - params.p_i)**2 / (2 * b * b)).max()
        if rel < FLUX_FLOOR:
            notes.append(f"slit at x={xc:g} receives relative amplitude {rel:.2e} < {FLUX_FLOOR:g}")
    for msg in notes:
        warnings.warn(msg, GeometryWarning, stacklevel=3)
    return notes


def classical_screen_integrand(params: GaussianParams, geom: SlitGeometry,
                               G: Callable | None = None):
    """|psi(x, p_x, t_S)|**2 before the slit cut-off is applied."""
    shift = geom.y_S / geom.p_y0

    def integrand(x, p):
        foot = x - p * shift
        amp = gaussian_qp(params, foot, p).astype(complex)
        if G is not None:
            amp = amp * np.exp(1j * G(foot, p))
        return np.abs(amp)**2

    return integrand


def classical_two_slit(params: GaussianParams, geom: SlitGeometry, x,
                       G: Callable | None = None, open_: SlitsOpen = SlitsOpen.BOTH,
                       rtol: float = 1e-10) -> ProbabilityCurve:
    """P(x) = sum over open slits of the integral of |psi|**2 over the slit's p window.

    ``G(x, p)`` is an optional initial phase; it cannot change the result.
    """
    notes = _flux_note(params, geom)
    f = classical_screen_integrand(params, geom, G)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    raw = np.empty_like(x)
    for i, xi in enumerate(x):
        raw[i] = sum(adaptive_gauss_legendre(lambda p: f(xi, p), lo, hi, rtol=rtol)
                     for lo, hi in momentum_windows(xi, geom, open_))
    return _curve(x, raw, notes=notes)


def classical_two_slit_grid(params: GaussianParams, geom: SlitGeometry, grid: PhaseSpaceGrid,
                            G: Callable | None = None, open_: SlitsOpen = SlitsOpen.BOTH,
                            interpolation: str = "bicubic") -> ProbabilityCurve:
    """Same experiment run through the phase-space grid solver.

    Evolve to the plate, multiply by the slit cut-offs, evolve to the
    screen and integrate |psi|**2 over p on the grid.
    """
    Q, P = grid.mesh()
    amp = gaussian_qp(params, Q, P).astype(complex)
    if G is not None:
        amp = amp * np.exp(1j * G(Q, P))
    psi = evolve_free(WaveFunction2D(grid, amp), geom.t_F, geom.m, interpolation)
    psi = psi.replace(psi.amplitudes * slit_mask(grid.q, geom, open_)[:, None])
    psi = evolve_free(psi, geom.t_S - geom.t_F, geom.m, interpolation)
    raw = np.sum(psi.density() * grid.weights(), axis=1) / grid.dq
    return _curve(grid.q, raw, notes=psi.warnings)


def quantum_slit_amplitudes(a: float, geom: SlitGeometry, x, qp: QuantumParams = QuantumParams(),
                            per_wavelength: int = 16):
    """psi_j(x, t_S) for each slit: the kernel integral over that slit only.

    Returns an array of shape (2, len(x)) ordered (first, second).
    """
    if not math.isclose(qp.m, geom.m):
        raise ValueError(f"quantum mass {qp.m} differs from geometry mass {geom.m}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    t_F, t_S = longitudinal_clock(geom)
    dt = t_S - t_F
    c = qp.m / (2 * qp.hbar * dt)
    pref = (2j * math.pi * qp.hbar * dt / qp.m) ** -0.5
    # phase gradient of the plate state is m x hbar t_F / (m^2 a^4 + hbar^2 t_F^2)
    chirp = qp.m * qp.hbar * t_F / ((qp.m * a * a)**2 + (qp.hbar * t_F)**2)
    out = []
    for lo, hi in geom.slits(SlitsOpen.BOTH):
        far = max(np.abs(x - lo).max(), np.abs(x - hi).max())
        max_freq = 2 * c * far + chirp * max(abs(lo), abs(hi))
        nodes, weights = oscillatory_nodes(lo, hi, max_freq, per_wavelength)
        w = weights * gaussian_free_closed_form(nodes, a, 0.0, t_F, qp)
        out.append(pref * _backend.chirp_sum(x, nodes, w, c))
    return np.array(out)


def quantum_two_slit(a: float, geom: SlitGeometry, x, qp: QuantumParams = QuantumParams(),
                     open_: SlitsOpen = SlitsOpen.BOTH) -> ProbabilityCurve:
    """|psi_1 + psi_2|**2 on the screen (or one slit's |psi_j|**2).

    ``cross`` holds psi_1* psi_2 + c.c., which vanishes with one slit closed.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    psi1, psi2 = quantum_slit_amplitudes(a, geom, x, qp)
    if open_ is SlitsOpen.ONLY_FIRST:
        psi2 = np.zeros_like(psi2)
    elif open_ is SlitsOpen.ONLY_SECOND:
        psi1 = np.zeros_like(psi1)
    raw = np.abs(psi1 + psi2)**2
    cross = 2 * np.real(np.conj(psi1) * psi2)
    return _curve(x, raw, cross)


@dataclass(frozen=True, eq=False)
class MinimaReport:
    count: int
    positions: np.ndarray
    mean_spacing: float


def analyze_minima(curve: ProbabilityCurve, window: tuple[float, float],
                   prominence: float = 1e-6) -> MinimaReport:
    """Strict interior local minima of P inside ``window``.

    A minimum counts only if it sits at least ``prominence * max P`` below
    the lower of the highest values on either side within the window.
    """
    lo, hi = window
    x, P = curve.x, curve.P
    if lo < x.min() - 1e-12 or hi > x.max() + 1e-12 or lo >= hi:
        raise DomainError(f"window [{lo}, {hi}] outside samples [{x.min()}, {x.max()}]")
    sel = (x >= lo) & (x <= hi)
    xs, ps = x[sel], P[sel]
    if len(xs) < 5:
        raise DomainError("need at least 5 samples inside the window")
    floor = prominence * ps.max()
    idx = [i for i in range(1, len(ps) - 1)
           if ps[i] < ps[i - 1] and ps[i] < ps[i + 1]
           and min(ps[:i].max(), ps[i + 1:].max()) - ps[i] >= floor]
    pos = xs[idx]
    spacing = float(np.mean(np.diff(pos))) if len(pos) > 1 else float("nan")
    return MinimaReport(len(pos), pos, spacing)
