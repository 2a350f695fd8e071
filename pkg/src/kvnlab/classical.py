"""Classical (Koopman-von Neumann) evolution of phase-space wave functions.

The Liouvillian is first order, so every backend here is a coordinate
remap: the value at (q, p) after time t is the initial value at the foot
of the backward Hamiltonian trajectory through (q, p). Free motion has the
closed-form foot (q - p t/m, p); general Hamiltonians use RK4.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _backend
from .core import (PhaseSpaceGrid, Representation, WaveFunction2D, norm_squared,
                   split_phase_modulus)
from .errors import MassLossWarning, RepresentationError

#: fraction of the norm that may leave the grid before a warning is raised
MASS_LOSS_TOLERANCE = 0.01


class HamiltonianKind(enum.Enum):
    FREE = "free"
    QUADRATIC = "quadratic"
    CUSTOM = "custom"


@dataclass(frozen=True)
class HamiltonianSpec:
    """H = p**2/2m + V(q).

    ``k`` is the spring constant for QUADRATIC; CUSTOM takes V and dV
    callables that accept numpy arrays.
    """

    kind: HamiltonianKind = HamiltonianKind.FREE
    m: float = 1.0
    k: float = 0.0
    V: Callable[[np.ndarray], np.ndarray] | None = None
    dV: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError(f"mass must be > 0, got {self.m}")
        if self.kind is HamiltonianKind.CUSTOM and self.dV is None:
            raise ValueError("custom Hamiltonian needs dV")

    @classmethod
    def free(cls, m: float = 1.0) -> "HamiltonianSpec":
        return cls(HamiltonianKind.FREE, m)

    @classmethod
    def quadratic(cls, k: float = 1.0, m: float = 1.0) -> "HamiltonianSpec":
        return cls(HamiltonianKind.QUADRATIC, m, k)

    @classmethod
    def custom(cls, V, dV, m: float = 1.0) -> "HamiltonianSpec":
        return cls(HamiltonianKind.CUSTOM, m, V=V, dV=dV)

    def dH_dp(self, q, p):
        return p / self.m

    def dH_dq(self, q, p):
        if self.kind is HamiltonianKind.FREE:
            return np.zeros_like(q)
        if self.kind is HamiltonianKind.QUADRATIC:
            return self.k * q
        return self.dV(q)

    def energy(self, q, p):
        if self.kind is HamiltonianKind.FREE:
            pot = 0.0
        elif self.kind is HamiltonianKind.QUADRATIC:
            pot = 0.5 * self.k * q**2
        else:
            pot = self.V(q) if self.V is not None else 0.0
        return p**2 / (2 * self.m) + pot


@dataclass(frozen=True)
class CharacteristicsConfig:
    """RK4 step (None -> t/max(10, ceil(t/0.01))) and interpolation kind."""

    ode_step: float | None = None
    interpolation: str = "bicubic"

    def __post_init__(self):
        if self.ode_step is not None and not self.ode_step > 0:
            raise ValueError(f"ode_step must be > 0, got {self.ode_step}")
        if self.interpolation not in ("bicubic", "bilinear"):
            raise ValueError(f"unknown interpolation {self.interpolation!r}")

    def n_steps(self, t: float) -> int:
        span = abs(t)
        if self.ode_step is None:
            return max(10, math.ceil(span / 0.01))
        if self.ode_step > span / 10:
            raise ValueError(f"ode_step {self.ode_step} exceeds t/10 for t={t}")
        return max(1, math.ceil(span / self.ode_step))


def _require_qp(psi: WaveFunction2D):
    if psi.representation is not Representation.QP:
        raise RepresentationError(f"expected a (q, p) wave function, got {psi.representation.name}")


def _sample_at(psi: WaveFunction2D, q, p, interpolation: str) -> np.ndarray:
    g = psi.grid
    return _backend.sample(psi.amplitudes, (q - g.q_min) / g.dq, (p - g.s_min) / g.ds,
                           interpolation)


def _finish(psi0: WaveFunction2D, amp: np.ndarray, renormalize: bool) -> WaveFunction2D:
    out = psi0.replace(amp)
    before = norm_squared(psi0)
    lost = 0.0 if before == 0 else max(0.0, 1.0 - norm_squared(out) / before)
    notes = list(psi0.warnings)
    if lost > MASS_LOSS_TOLERANCE:
        msg = f"{100 * lost:.2f}% of the probability mass left the grid"
        warnings.warn(msg, MassLossWarning, stacklevel=3)
        notes.append(msg)
    if renormalize and norm_squared(out) > 0:
        amp = amp / math.sqrt(norm_squared(out) / before)
    return psi0.replace(amp, warnings=tuple(notes), lost_mass=lost)


def free_foot(q, p, t: float, m: float):
    """Foot of the backward free trajectory through (q, p)."""
    return q - p * t / m, p


def evolve_free(psi0: WaveFunction2D, t: float, m: float = 1.0, interpolation: str = "bicubic",
                renormalize: bool = False) -> WaveFunction2D:
    """psi(q, p, t) = psi0(q - p t/m, p); points whose foot leaves the grid get 0."""
    _require_qp(psi0)
    if t == 0:
        return psi0
    Q, P = psi0.grid.mesh()
    qb, pb = free_foot(Q, P, t, m)
    return _finish(psi0, _sample_at(psi0, qb, pb, interpolation), renormalize)


def apply_free_kernel(field: WaveFunction2D, t: float, m: float = 1.0,
                      interpolation: str = "bicubic") -> WaveFunction2D:
    """Action of the delta kernel delta(q - q_i - p_i t/m) delta(p - p_i).

    Implemented as the exact coordinate remap, so it can propagate either a
    wave function or a density stored on the same grid.
    """
    return evolve_free(field, t, m, interpolation)


def backward_characteristics(q, p, H: HamiltonianSpec, t: float,
                             cfg: CharacteristicsConfig = CharacteristicsConfig()):
    """Integrate qdot = -dH/dp, pdot = +dH/dq from (q, p) for time t."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    if t == 0:
        return q.copy(), p.copy()
    n = cfg.n_steps(t)
    if H.kind is HamiltonianKind.FREE:
        return _backend.backward_flow_quadratic(q, p, t, H.m, 0.0, n)
    if H.kind is HamiltonianKind.QUADRATIC:
        return _backend.backward_flow_quadratic(q, p, t, H.m, H.k, n)
    h = t / n
    q = q.copy()
    p = p.copy()

    def rhs(qq, pp):
        return -H.dH_dp(qq, pp), H.dH_dq(qq, pp)

    for _ in range(n):
        k1 = rhs(q, p)
        k2 = rhs(q + 0.5 * h * k1[0], p + 0.5 * h * k1[1])
        k3 = rhs(q + 0.5 * h * k2[0], p + 0.5 * h * k2[1])
        k4 = rhs(q + h * k3[0], p + h * k3[1])
        q += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        p += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    return q, p


def forward_flow(q, p, H: HamiltonianSpec, t: float,
                 cfg: CharacteristicsConfig = CharacteristicsConfig()):
    """Hamilton's equations run forward: the backward flow with time reversed."""
    return backward_characteristics(q, p, H, -t, cfg)


def evolve_characteristics(psi0: WaveFunction2D, H: HamiltonianSpec, t: float,
                           cfg: CharacteristicsConfig = CharacteristicsConfig(),
                           renormalize: bool = False) -> WaveFunction2D:
    """Semi-Lagrangian solve of i dpsi/dt = L psi for a general H."""
    _require_qp(psi0)
    if t == 0:
        return psi0
    Q, P = psi0.grid.mesh()
    qb, pb = backward_characteristics(Q, P, H, t, cfg)
    return _finish(psi0, _sample_at(psi0, qb, pb, cfg.interpolation), renormalize)


def spectral_derivative(f: np.ndarray, h: float, axis: int) -> np.ndarray:
    n = f.shape[axis]
    k = 2 * np.pi * np.fft.fftfreq(n, d=h)
    shape = [1] * f.ndim
    shape[axis] = n
    return np.fft.ifft(1j * k.reshape(shape) * np.fft.fft(f, axis=axis), axis=axis)


def apply_liouvillian(psi: WaveFunction2D, H: HamiltonianSpec) -> WaveFunction2D:
    """L psi = -i dH/dp dpsi/dq + i dH/dq dpsi/dp with FFT derivatives."""
    _require_qp(psi)
    g = psi.grid
    Q, P = g.mesh()
    amp = psi.amplitudes
    d_q = spectral_derivative(amp, g.dq, 0)
    d_p = spectral_derivative(amp, g.ds, 1)
    return psi.replace(-1j * H.dH_dp(Q, P) * d_q + 1j * H.dH_dq(Q, P) * d_p)


@dataclass(frozen=True)
class DecouplingReport:
    modulus_diff: float
    phase_diff: float
    max_evolved_phase: float
    max_imag: float
    floor: float


def _wrap(angle):
    return (angle + np.pi) % (2 * np.pi) - np.pi


def decoupling_check(F0: np.ndarray, G0: np.ndarray, grid: PhaseSpaceGrid, H: HamiltonianSpec,
                     t: float, cfg: CharacteristicsConfig = CharacteristicsConfig(),
                     floor: float = 1e-6) -> DecouplingReport:
    """Evolve F0 exp(iG0) as one field and F0, G0 as separate scalar fields.

    All three are transported along the same characteristics. Differences
    are sup-norms over the region where |psi(t)| exceeds ``floor`` times
    its maximum; phase differences are taken modulo 2 pi.
    """
    F0 = np.asarray(F0, dtype=float)
    G0 = np.asarray(G0, dtype=float)
    if np.any(F0 < 0):
        raise ValueError("modulus field must be non-negative")
    Q, P = grid.mesh()
    if t == 0:
        qb, pb = Q, P
    else:
        qb, pb = backward_characteristics(Q, P, H, t, cfg)
    fq, fs = (qb - grid.q_min) / grid.dq, (pb - grid.s_min) / grid.ds
    psi_t = _backend.sample(F0 * np.exp(1j * G0), fq, fs, cfg.interpolation)
    F_t = _backend.sample(F0, fq, fs, cfg.interpolation).real
    G_t = _backend.sample(G0, fq, fs, cfg.interpolation).real
    pair = split_phase_modulus(psi_t, floor=floor)
    mask = pair.modulus > pair.floor
    mod_diff = np.abs(F_t - pair.modulus)[mask]
    ph_diff = np.abs(_wrap(G_t - np.angle(psi_t)))[mask]
    return DecouplingReport(
        modulus_diff=float(mod_diff.max(initial=0.0)),
        phase_diff=float(ph_diff.max(initial=0.0)),
        max_evolved_phase=float(np.abs(np.angle(psi_t))[mask].max(initial=0.0)),
        max_imag=float(np.abs(psi_t.imag).max()),
        floor=pair.floor,
    )


def commensurate_grid(q_half: float, p_half: float, n_p: int, ratio: int,
                      axis_kind: Representation = Representation.QP) -> PhaseSpaceGrid:
    """Grid with dp = ratio * dq and both axes centred on a node at 0.

    For free motion with t/m a multiple of 1/ratio, every backward foot
    q - p t/m lands exactly on a node, so the remap needs no interpolation
    error and commutes with pointwise maps such as |.|**2.
    """
    if n_p % 2 == 0:
        raise ValueError("n_p must be odd so that p = 0 is a node")
    dp = 2 * p_half / (n_p - 1)
    dq = dp / ratio
    half_q = math.ceil(q_half / dq)
    return PhaseSpaceGrid(-half_q * dq, half_q * dq, -p_half, p_half, 2 * half_q + 1, n_p,
                          axis_kind)
