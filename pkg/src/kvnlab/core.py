"""Grids, wave-function containers, Gaussian states and observables.

Everything here works on uniform tensor grids with trapezoid quadrature.
Constructors renormalize on the grid, so truncated Gaussian tails never
break the unit-norm invariant.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .errors import DomainCoverageError, EvaluationError

#: default extents, wide enough for the unit Gaussians evolved to t=2
DEFAULT_Q_RANGE = (-12.0, 12.0)
DEFAULT_P_RANGE = (-8.0, 8.0)
DEFAULT_NODES = 512

#: modulus floor (relative to max |psi|) below which the phase is undefined
PHASE_FLOOR = 1e-12


class Representation(enum.Enum):
    """Which variable the second phase-space axis carries."""

    QP = "p"
    Q_LAMBDA_P = "lambda_p"


# the grid's second-axis kind and the representation tag are the same thing
AxisKind = Representation


def _trapezoid_weights(n: int, h: float) -> np.ndarray:
    w = np.full(n, h)
    w[0] = w[-1] = 0.5 * h
    return w


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n_x: int

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError(f"need x_min < x_max, got {self.x_min}, {self.x_max}")
        if self.n_x < 2:
            raise ValueError(f"need n_x >= 2, got {self.n_x}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_x - 1)

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_x)

    def weights(self) -> np.ndarray:
        return _trapezoid_weights(self.n_x, self.dx)

    @classmethod
    def default(cls) -> "Grid1D":
        return cls(*DEFAULT_Q_RANGE, DEFAULT_NODES)


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """Uniform lattice over (q, p) or (q, lambda_p).

    Axis 0 is q, axis 1 is the second variable named by ``axis_kind``.
    """

    q_min: float
    q_max: float
    s_min: float
    s_max: float
    n_q: int
    n_s: int
    axis_kind: Representation = Representation.QP
    #: first node of the conjugate p lattice, kept so lambda_p grids can be inverted
    conjugate_min: float | None = None

    def __post_init__(self):
        if not self.q_min < self.q_max:
            raise ValueError(f"need q_min < q_max, got {self.q_min}, {self.q_max}")
        if not self.s_min < self.s_max:
            raise ValueError(f"need s_min < s_max, got {self.s_min}, {self.s_max}")
        if self.n_q < 2 or self.n_s < 2:
            raise ValueError(f"need at least 2 nodes per axis, got {self.n_q}x{self.n_s}")

    @classmethod
    def default(cls) -> "PhaseSpaceGrid":
        return cls(*DEFAULT_Q_RANGE, *DEFAULT_P_RANGE, DEFAULT_NODES, DEFAULT_NODES)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_q, self.n_s)

    @property
    def dq(self) -> float:
        return (self.q_max - self.q_min) / (self.n_q - 1)

    @property
    def ds(self) -> float:
        return (self.s_max - self.s_min) / (self.n_s - 1)

    @property
    def q(self) -> np.ndarray:
        return self.q_min + self.dq * np.arange(self.n_q)

    @property
    def s(self) -> np.ndarray:
        return self.s_min + self.ds * np.arange(self.n_s)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.q, self.s, indexing="ij")

    def weights(self) -> np.ndarray:
        return np.outer(_trapezoid_weights(self.n_q, self.dq),
                        _trapezoid_weights(self.n_s, self.ds))

    def with_axis(self, s_min: float, s_max: float, n_s: int, axis_kind: Representation,
                  conjugate_min: float | None = None) -> "PhaseSpaceGrid":
        return PhaseSpaceGrid(self.q_min, self.q_max, s_min, s_max, self.n_q, n_s, axis_kind,
                              conjugate_min)


@dataclass(frozen=True, eq=False)
class WaveFunction2D:
    """Complex amplitudes on a phase-space grid.

    ``warnings`` collects diagnostics (e.g. boundary mass loss) attached by
    the evolution routines; ``lost_mass`` is the fraction of the norm that
    left the grid.
    """

    grid: PhaseSpaceGrid
    amplitudes: np.ndarray
    warnings: tuple[str, ...] = field(default=())
    lost_mass: float = 0.0

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != self.grid.shape:
            raise ValueError(f"amplitudes shape {amp.shape} does not match grid {self.grid.shape}")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def representation(self) -> Representation:
        return self.grid.axis_kind

    def replace(self, amplitudes=None, **kw) -> "WaveFunction2D":
        amp = self.amplitudes if amplitudes is None else amplitudes
        return WaveFunction2D(kw.pop("grid", self.grid), amp, **kw)

    def __mul__(self, other) -> "WaveFunction2D":
        return self.replace(self.amplitudes * other)

    __rmul__ = __mul__

    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True, eq=False)
class WaveFunction1D:
    grid: Grid1D
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != (self.grid.n_x,):
            raise ValueError(f"amplitudes shape {amp.shape} does not match n_x={self.grid.n_x}")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def x_min(self) -> float:
        return self.grid.x_min

    @property
    def x_max(self) -> float:
        return self.grid.x_max

    @property
    def n_x(self) -> int:
        return self.grid.n_x

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def replace(self, amplitudes) -> "WaveFunction1D":
        return WaveFunction1D(self.grid, amplitudes)

    def __mul__(self, other) -> "WaveFunction1D":
        return self.replace(self.amplitudes * other)

    __rmul__ = __mul__

    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class GaussianParams:
    """Widths a (position), b (momentum), offset p_i and mass m.

    At t=0 the state has variances a**2/2 in q and b**2/2 in p.
    """

    a: float
    b: float
    p_i: float = 0.0
    m: float = 1.0

    def __post_init__(self):
        for name in ("a", "b", "m"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")


@dataclass(frozen=True, eq=False)
class PhaseModulusPair:
    modulus: np.ndarray
    phase: np.ndarray
    floor: float


WaveFunction = Union[WaveFunction1D, WaveFunction2D]


def _weights(psi: WaveFunction) -> np.ndarray:
    return psi.grid.weights()


def norm_squared(psi: WaveFunction) -> float:
    """Trapezoid integral of |psi|**2 over the grid."""
    return float(np.sum(psi.density() * _weights(psi)))


def normalized(psi):
    return psi.replace(psi.amplitudes / np.sqrt(norm_squared(psi)))


def _check_cover(lo, hi, centre, width, label):
    if lo > centre - width or hi < centre + width:
        raise DomainCoverageError(
            f"{label}-axis [{lo}, {hi}] does not cover {centre} +/- {width} (6 sigma)")


def gaussian_qp(params: GaussianParams, q, p) -> np.ndarray:
    """Continuum double Gaussian evaluated at arbitrary points."""
    a, b = params.a, params.b
    return np.exp(-q**2 / (2 * a * a) - (p - params.p_i)**2 / (2 * b * b)) / np.sqrt(np.pi * a * b)


def make_gaussian_qp(params: GaussianParams, grid: PhaseSpaceGrid | None = None) -> WaveFunction2D:
    grid = grid or PhaseSpaceGrid.default()
    if grid.axis_kind is not Representation.QP:
        raise ValueError("make_gaussian_qp needs a momentum grid")
    _check_cover(grid.q_min, grid.q_max, 0.0, 6 * params.a, "q")
    _check_cover(grid.s_min, grid.s_max, params.p_i, 6 * params.b, "p")
    Q, P = grid.mesh()
    return normalized(WaveFunction2D(grid, gaussian_qp(params, Q, P)))


def make_gaussian_x(a: float, p_i: float = 0.0, hbar: float = 1.0,
                    grid1d: Grid1D | None = None) -> WaveFunction1D:
    if not a > 0:
        raise ValueError(f"a must be > 0, got {a}")
    grid1d = grid1d or Grid1D.default()
    _check_cover(grid1d.x_min, grid1d.x_max, 0.0, 6 * a, "x")
    x = grid1d.x
    amp = np.exp(-x**2 / (2 * a * a) + 1j * p_i * x / hbar) / np.sqrt(np.sqrt(np.pi) * a)
    return normalized(WaveFunction1D(grid1d, amp))


Observable = Union[Callable[[np.ndarray, np.ndarray], np.ndarray], np.ndarray, float]


def moment(psi: WaveFunction2D, f: Observable) -> float:
    """Expectation of a multiplicative observable f(q, s).

    ``f`` may be a callable taking the meshed (q, s) arrays, an array of the
    grid shape or a scalar.
    """
    if callable(f):
        values = f(*psi.grid.mesh())
    else:
        values = f
    values = np.broadcast_to(np.asarray(values, dtype=float), psi.grid.shape)
    if not np.all(np.isfinite(values)):
        raise EvaluationError("observable is not finite on the grid")
    w = psi.density() * psi.grid.weights()
    return float(np.sum(values * w) / np.sum(w))


def gaussian_moments(psi: WaveFunction2D) -> dict[str, float]:
    """Means and variances of q and of the second axis variable."""
    q_mean = moment(psi, lambda q, s: q)
    s_mean = moment(psi, lambda q, s: s)
    return {
        "q_mean": q_mean,
        "p_mean": s_mean,
        "q_var": moment(psi, lambda q, s: (q - q_mean)**2),
        "p_var": moment(psi, lambda q, s: (s - s_mean)**2),
    }


def moment_1d(psi: WaveFunction1D, f) -> float:
    values = f(psi.x) if callable(f) else np.broadcast_to(f, psi.x.shape)
    if not np.all(np.isfinite(values)):
        raise EvaluationError("observable is not finite on the grid")
    w = psi.density() * psi.grid.weights()
    return float(np.sum(values * w) / np.sum(w))


def position_stats(psi: WaveFunction1D) -> tuple[float, float]:
    """Mean and variance of x."""
    mean = moment_1d(psi, lambda x: x)
    return mean, moment_1d(psi, lambda x: (x - mean)**2)


def split_phase_modulus(psi: WaveFunction | np.ndarray, floor: float = PHASE_FLOOR) -> PhaseModulusPair:
    """Write psi = F exp(iG) with G unwrapped along axis 0 (q or x).

    The phase is set to 0 wherever F <= floor * max F.
    """
    amp = psi.amplitudes if hasattr(psi, "amplitudes") else np.asarray(psi, dtype=complex)
    F = np.abs(amp)
    cut = floor * F.max() if F.size else 0.0
    G = np.unwrap(np.angle(amp), axis=0)
    G = np.where(F > cut, G, 0.0)
    return PhaseModulusPair(F, G, cut)


def join_phase_modulus(pair: PhaseModulusPair) -> np.ndarray:
    return pair.modulus * np.exp(1j * pair.phase)
