"""The (q, lambda_p) representation: p enters through a Fourier transform.

Conventions: psi(q, lam) = (1/sqrt(2 pi)) int dp exp(-i p lam) psi(q, p),
approximated by a DFT along p scaled by dp/sqrt(2 pi). The lambda lattice
is the one conjugate to the p lattice, lam_k = 2 pi k/(n dp) with k
centred on 0. In this basis p acts as i d/dlam and lam multiplies.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical import evolve_free, spectral_derivative
from .core import PhaseSpaceGrid, Representation, WaveFunction2D
from .errors import RepresentationError, SelfAdjointnessError

RepresentationTag = Representation

_SQRT_2PI = math.sqrt(2 * math.pi)


def _require(psi: WaveFunction2D, rep: Representation):
    if psi.representation is not rep:
        raise RepresentationError(f"expected {rep.name}, got {psi.representation.name}")


def _centred_k(n: int) -> np.ndarray:
    return np.fft.fftshift(np.fft.fftfreq(n) * n)


def lambda_grid(grid: PhaseSpaceGrid) -> PhaseSpaceGrid:
    """The (q, lambda_p) lattice conjugate to a (q, p) lattice."""
    lam = 2 * np.pi * _centred_k(grid.n_s) / (grid.n_s * grid.ds)
    return grid.with_axis(float(lam[0]), float(lam[-1]), grid.n_s, Representation.Q_LAMBDA_P,
                          conjugate_min=grid.s_min)


def momentum_grid(grid: PhaseSpaceGrid) -> PhaseSpaceGrid:
    """Inverse of :func:`lambda_grid`."""
    n = grid.n_s
    dp = 2 * np.pi / (n * grid.ds)
    p_min = grid.conjugate_min
    if p_min is None:
        p_min = -dp * (n // 2)
    return grid.with_axis(p_min, p_min + dp * (n - 1), n, Representation.QP)


def _phase(grid_lam: PhaseSpaceGrid, p_min: float) -> np.ndarray:
    return np.exp(-1j * p_min * grid_lam.s)


def to_lambda_p(psi: WaveFunction2D) -> WaveFunction2D:
    _require(psi, Representation.QP)
    g = psi.grid
    out_grid = lambda_grid(g)
    spec = np.fft.fftshift(np.fft.fft(psi.amplitudes, axis=1), axes=1)
    amp = spec * (g.ds / _SQRT_2PI) * _phase(out_grid, g.s_min)[None, :]
    return WaveFunction2D(out_grid, amp, psi.warnings, psi.lost_mass)


def from_lambda_p(psi: WaveFunction2D) -> WaveFunction2D:
    _require(psi, Representation.Q_LAMBDA_P)
    out_grid = momentum_grid(psi.grid)
    spec = psi.amplitudes / _phase(psi.grid, out_grid.s_min)[None, :] * (_SQRT_2PI / out_grid.ds)
    amp = np.fft.ifft(np.fft.ifftshift(spec, axes=1), axis=1)
    return WaveFunction2D(out_grid, amp, psi.warnings, psi.lost_mass)


def apply_p(psi: WaveFunction2D) -> WaveFunction2D:
    """p acting as i d/dlam, differentiated through the conjugate lattice."""
    _require(psi, Representation.Q_LAMBDA_P)
    qp = from_lambda_p(psi)
    return to_lambda_p(qp.replace(qp.amplitudes * qp.grid.s[None, :]))


def d_dlambda(psi: WaveFunction2D) -> np.ndarray:
    return -1j * apply_p(psi).amplitudes


def _expect(psi: WaveFunction2D, op_amp: np.ndarray) -> complex:
    w = psi.grid.weights()
    return complex(np.sum(np.conj(psi.amplitudes) * op_amp * w) / np.sum(psi.density() * w))


@dataclass(frozen=True)
class MomentumMean:
    value: float
    imag: float

    def __float__(self):
        return self.value


def mean_p_in_lambda(psi: WaveFunction2D, imag_tol: float = 1e-6) -> MomentumMean:
    """<psi| i d/dlam |psi>; raises if the imaginary part exceeds ``imag_tol``."""
    val = _expect(psi, apply_p(psi).amplitudes)
    if abs(val.imag) > imag_tol:
        raise SelfAdjointnessError(f"<p> has imaginary part {val.imag:.3e}")
    return MomentumMean(val.real, val.imag)


def moments_lambda(psi: WaveFunction2D) -> dict[str, float]:
    """q and p means/variances computed inside the lambda representation."""
    _require(psi, Representation.Q_LAMBDA_P)
    Q, L = psi.grid.mesh()
    w = psi.grid.weights()
    dens = psi.density() * w
    total = dens.sum()
    q_mean = float((Q * dens).sum() / total)
    q_var = float(((Q - q_mean)**2 * dens).sum() / total)
    p_psi = apply_p(psi)
    p_mean = _expect(psi, p_psi.amplitudes).real
    p2 = _expect(psi, apply_p(p_psi).amplitudes).real
    return {"q_mean": q_mean, "p_mean": p_mean, "q_var": q_var, "p_var": p2 - p_mean**2}


def uncertainty_product(psi: WaveFunction2D) -> float:
    """Delta p * Delta lambda_p."""
    mom = moments_lambda(psi)
    Q, L = psi.grid.mesh()
    dens = psi.density() * psi.grid.weights()
    lam_mean = (L * dens).sum() / dens.sum()
    lam_var = ((L - lam_mean)**2 * dens).sum() / dens.sum()
    return float(math.sqrt(mom["p_var"] * lam_var))


def evolve_free_lambda(psi: WaveFunction2D, t: float, m: float = 1.0,
                       method: str = "spectral") -> WaveFunction2D:
    """Free evolution under L = (1/m) d^2/(dq dlam).

    ``spectral`` multiplies by exp(-i lam_q p t/m) in the (lambda_q, p)
    basis (periodic in q); ``remap`` goes back to (q, p), applies the
    characteristic remap and returns.
    """
    _require(psi, Representation.Q_LAMBDA_P)
    if method == "remap":
        return to_lambda_p(evolve_free(from_lambda_p(psi), t, m))
    if method != "spectral":
        raise ValueError(f"unknown method {method!r}")
    qp = from_lambda_p(psi)
    g = qp.grid
    lam_q = 2 * np.pi * np.fft.fftfreq(g.n_q, d=g.dq)
    spec = np.fft.fft(qp.amplitudes, axis=0)
    spec *= np.exp(-1j * lam_q[:, None] * g.s[None, :] * t / m)
    return to_lambda_p(qp.replace(np.fft.ifft(spec, axis=0)))


def gaussian_lambda_closed_form(q, lam, a: float, b: float, p_i: float, t: float, m: float = 1.0):
    """Transformed double Gaussian after free evolution for time t (unit norm)."""
    den = m * m * a * a + t * t * b * b
    N = m * math.sqrt(a * b / math.pi) / math.sqrt(den)
    inner = lam * m * a * a * b * b + 1j * q * t * b * b + 1j * p_i * m * a * a
    return N * np.exp(-q**2 / (2 * a * a) - p_i**2 / (2 * b * b)
                      - 0.5 * inner**2 / (a * a * b * b * den))


def probability_current_lambda(psi: WaveFunction2D, m: float = 1.0) -> np.ndarray:
    """J = (i/m)(psi* d_q d_lam psi - psi d_q d_lam psi*)."""
    _require(psi, Representation.Q_LAMBDA_P)
    mixed = spectral_derivative(d_dlambda(psi), psi.grid.dq, 0)
    return -2.0 / m * np.imag(np.conj(psi.amplitudes) * mixed)


def continuity_residual_lambda(snapshots, dt: float, m: float = 1.0) -> float:
    """sup |d rho/dt + J| with a centred time difference.

    A potential adds -lam V'(q) psi to the equation of motion, which cancels
    in the equation for rho; it only acts through the snapshots.
    """
    before, now, after = snapshots
    for s in snapshots:
        _require(s, Representation.Q_LAMBDA_P)
    drho = (after.density() - before.density()) / (2 * dt)
    return float(np.abs(drho + probability_current_lambda(now, m)).max())


@dataclass(frozen=True)
class LambdaLimitRow:
    b: float
    lam_std: float          # spread of |psi|^2 along lambda_p
    flatness: float         # min/max of |psi| over the lambda window
    phase_error: float      # max |arg psi + p_i lam| (mod 2 pi) where |psi| is resolvable


def lambda_limit_report(p_i: float, b_values, a: float = 1.0, lam_window: float = 2.0,
                        n: int = 401) -> list[LambdaLimitRow]:
    """How the q = 0 slice of the transformed Gaussian behaves as b varies.

    Small b flattens |psi| in lambda_p so psi approaches the plane wave
    exp(-i p_i lam); large b squeezes it onto lam = 0 instead. The phase
    is exp(-i p_i lam) for every b, so only the modulus tells the limits apart.
    """
    lam = np.linspace(-lam_window, lam_window, n)
    rows = []
    for b in b_values:
        psi = gaussian_lambda_closed_form(0.0, lam, a, b, p_i, 0.0)
        mod = np.abs(psi)
        ok = mod > 1e-12 * mod.max()
        err = np.abs(np.angle(psi * np.exp(1j * p_i * lam)))[ok]
        rows.append(LambdaLimitRow(float(b), 1.0 / (math.sqrt(2) * b), float(mod.min() / mod.max()),
                                   float(err.max(initial=0.0))))
    return rows
