"""Quantum free-particle evolution used as the comparison baseline."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import make_interp_spline

from . import _backend
from .core import Grid1D, WaveFunction1D, normalized
from .errors import DomainError
from .quadrature import oscillatory_nodes


@dataclass(frozen=True)
class QuantumParams:
    hbar: float = 1.0
    m: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0 and self.m > 0):
            raise ValueError(f"hbar and m must be > 0, got {self.hbar}, {self.m}")


def gaussian_free_closed_form(x, a: float, p_i: float, t: float, qp: QuantumParams = QuantumParams()):
    """Free evolution of exp(-x**2/2a**2 + i p_i x/hbar), unit normalized.

    Includes the complex prefactor, so the global phase is the one the
    propagator produces.
    """
    m, hbar = qp.m, qp.hbar
    z = m * a * a + 1j * hbar * t
    pref = np.sqrt(m * a / (math.sqrt(math.pi) * z))
    return pref * np.exp(-m / (2 * z) * (x - p_i * t / m)**2
                         + 1j / hbar * (p_i * x - p_i**2 * t / (2 * m)))


def evolve_gaussian_free(a: float, p_i: float, t: float, qp: QuantumParams = QuantumParams(),
                         grid1d: Grid1D | None = None) -> WaveFunction1D:
    if not a > 0:
        raise ValueError(f"a must be > 0, got {a}")
    grid1d = grid1d or Grid1D.default()
    return normalized(WaveFunction1D(grid1d, gaussian_free_closed_form(grid1d.x, a, p_i, t, qp)))


def gaussian_variance(a: float, t: float, qp: QuantumParams = QuantumParams()) -> float:
    return 0.5 * a * a * (1 + (t * qp.hbar)**2 / (qp.m**2 * a**4))


def free_kernel(x_b, t_b: float, x_a, t_a: float, qp: QuantumParams = QuantumParams()):
    """Free-particle propagator K(x_b, t_b | x_a, t_a), principal square root.

    Positions may be arrays and may be complex (used for contour checks).
    """
    dt = t_b - t_a
    if not dt > 0:
        raise DomainError(f"kernel needs t_b > t_a, got {t_b} <= {t_a}")
    pref = (2j * math.pi * qp.hbar * dt / qp.m) ** -0.5
    return pref * np.exp(1j * qp.m * (np.asarray(x_b) - np.asarray(x_a))**2 / (2 * qp.hbar * dt))


def _bandwidth(psi: WaveFunction1D, rel: float = 1e-10) -> float:
    """Largest wavenumber carrying more than ``rel`` of the peak spectral amplitude."""
    spec = np.abs(np.fft.fft(psi.amplitudes))
    k = 2 * np.pi * np.fft.fftfreq(psi.n_x, d=psi.grid.dx)
    return float(np.abs(k[spec > rel * spec.max()]).max())


def propagate_kernel(psi0: WaveFunction1D, t0: float, t1: float, qp: QuantumParams = QuantumParams(),
                     per_wavelength: int = 16, renormalize: bool = True) -> WaveFunction1D:
    """psi(x, t1) = int K(x, t1 | x', t0) psi0(x') dx' by composite Gauss-Legendre.

    psi0 is spline-interpolated onto the quadrature nodes; its support is
    taken to be its grid. Output lives on the same grid.
    """
    if t1 == t0:
        return psi0
    dt = t1 - t0
    if not dt > 0:
        raise DomainError("propagate_kernel only runs forward in time")
    g = psi0.grid
    span = g.x_max - g.x_min
    max_freq = qp.m * span / (qp.hbar * dt) + _bandwidth(psi0)
    nodes, weights = oscillatory_nodes(g.x_min, g.x_max, max_freq, per_wavelength)
    spline = make_interp_spline(g.x, psi0.amplitudes, k=3)
    w = weights * spline(nodes)
    c = qp.m / (2 * qp.hbar * dt)
    pref = (2j * math.pi * qp.hbar * dt / qp.m) ** -0.5
    out = WaveFunction1D(g, pref * _backend.chirp_sum(g.x, nodes, w, c))
    return normalized(out) if renormalize else out


@dataclass(frozen=True)
class MadelungResidual:
    r_S: float
    r_A: float
    quantum_potential_max: float
    n_points: int


def _unwrap_from_peak(phase: np.ndarray, peak: int) -> np.ndarray:
    right = np.unwrap(phase[peak:])
    left = np.unwrap(phase[:peak + 1][::-1])[::-1]
    return np.concatenate([left[:-1], right])


def madelung_residual(snapshots, dt: float, V=None, qp: QuantumParams = QuantumParams(),
                      window_floor: float = 1e-3) -> MadelungResidual:
    """Residuals of the amplitude/phase equations from three snapshots.

    ``snapshots`` are psi at t - dt, t, t + dt on one grid. With
    psi = A exp(iS/hbar):

        dS/dt + S'**2/2m + V - hbar**2 A''/(2mA) = 0
        m dA/dt + A'S' + A S''/2 = 0

    Derivatives are second-order centred differences. Residuals are
    sup-norms over interior nodes where A > window_floor * max A.
    """
    before, now, after = snapshots
    g = now.grid
    h = g.dx
    m, hbar = qp.m, qp.hbar
    A = np.abs(now.amplitudes)
    peak = int(np.argmax(A))
    S = hbar * _unwrap_from_peak(np.angle(now.amplitudes), peak)
    # centred time difference of the phase without unwrapping across snapshots
    dS_dt = hbar * np.angle(after.amplitudes * np.conj(before.amplitudes)) / (2 * dt)
    dA_dt = (np.abs(after.amplitudes) - np.abs(before.amplitudes)) / (2 * dt)

    def d1(f):
        return (f[2:] - f[:-2]) / (2 * h)

    def d2(f):
        return (f[2:] - 2 * f[1:-1] + f[:-2]) / h**2

    Ai = A[1:-1]
    mask = Ai > window_floor * A.max()
    if not mask.any():
        raise DomainError("no grid points above the amplitude floor")
    x = g.x[1:-1]
    pot = np.zeros_like(x) if V is None else np.broadcast_to(V(x) if callable(V) else V, x.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        qpot = hbar**2 * d2(A) / (2 * m * Ai)
    res_S = dS_dt[1:-1] + d1(S)**2 / (2 * m) + pot - qpot
    res_A = m * dA_dt[1:-1] + d1(A) * d1(S) + 0.5 * Ai * d2(S)
    return MadelungResidual(
        r_S=float(np.abs(res_S[mask]).max()),
        r_A=float(np.abs(res_A[mask]).max()),
        quantum_potential_max=float(np.abs(qpot[mask]).max()),
        n_points=int(mask.sum()),
    )
