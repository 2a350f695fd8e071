import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kvnlab.classical import (CharacteristicsConfig, HamiltonianSpec, apply_free_kernel,
                              apply_liouvillian, backward_characteristics, commensurate_grid,
                              decoupling_check, evolve_characteristics, evolve_free, forward_flow)
from kvnlab.core import (GaussianParams, PhaseSpaceGrid, WaveFunction2D, gaussian_moments,
                         gaussian_qp, make_gaussian_qp, norm_squared)
from kvnlab.errors import MassLossWarning, RepresentationError
from kvnlab.representation import to_lambda_p


def exact_free(params, Q, P, t):
    return gaussian_qp(params, Q - P * t / params.m, P)


@pytest.mark.parametrize("interp,tol", [("bicubic", 1e-6), ("bilinear", 1e-2)])
def test_free_remap_against_closed_form(unit_gaussian, interp, tol):
    params = GaussianParams(1.0, 1.0, 0.5, 1.0)
    out = evolve_free(unit_gaussian, 2.0, interpolation=interp)
    Q, P = out.grid.mesh()
    assert np.abs(out.amplitudes - exact_free(params, Q, P, 2.0)).max() < tol


def test_moments_follow_free_streaming(unit_gaussian):
    mom = gaussian_moments(evolve_free(unit_gaussian, 2.0))
    assert mom["q_mean"] == pytest.approx(1.0, abs=1e-6)
    assert mom["p_mean"] == pytest.approx(0.5, abs=1e-6)
    assert mom["q_var"] == pytest.approx(2.5, abs=1e-6)
    assert mom["p_var"] == pytest.approx(0.5, abs=1e-6)


def test_characteristics_agree_with_free_remap(unit_gaussian):
    a = evolve_free(unit_gaussian, 1.3)
    b = evolve_characteristics(unit_gaussian, HamiltonianSpec.free(), 1.3)
    assert np.abs(a.amplitudes - b.amplitudes).max() < 1e-12


def test_custom_potential_matches_quadratic():
    q, p = np.linspace(-1, 1, 7), np.linspace(0.5, -0.5, 7)
    quad = HamiltonianSpec.quadratic(2.0, 1.5)
    cust = HamiltonianSpec.custom(lambda x: x * x, lambda x: 2 * x, 1.5)
    a = backward_characteristics(q, p, quad, 0.9)
    b = backward_characteristics(q, p, cust, 0.9)
    assert np.allclose(a, b, atol=1e-12)


def test_forward_then_backward_is_identity():
    H = HamiltonianSpec.custom(lambda x: 0.25 * x**4, lambda x: x**3)
    q, p = np.array([0.3, -1.0]), np.array([0.7, 0.2])
    qf, pf = forward_flow(q, p, H, 1.0)
    qb, pb = backward_characteristics(qf, pf, H, 1.0)
    assert np.allclose(qb, q, atol=1e-9) and np.allclose(pb, p, atol=1e-9)


def test_energy_conserved_along_flow():
    H = HamiltonianSpec.custom(lambda x: 1 - np.cos(x), np.sin)
    q, p = np.array([0.5, 2.0]), np.array([1.0, 0.0])
    qf, pf = forward_flow(q, p, H, 5.0)
    assert np.allclose(H.energy(qf, pf), H.energy(q, p), atol=1e-8)


def test_oscillator_quarter_turn():
    grid = PhaseSpaceGrid(-8, 8, -8, 8, 257, 257)
    params = GaussianParams(0.8, 1.1, 1.0)
    psi0 = make_gaussian_qp(params, grid)
    out = evolve_characteristics(psi0, HamiltonianSpec.quadratic(1.0), math.pi / 2)
    Q, P = grid.mesh()
    ref = gaussian_qp(params, -P, Q) / math.sqrt(norm_squared(WaveFunction2D(grid, gaussian_qp(params, Q, P))))
    assert np.abs(out.amplitudes - ref).max() < 1e-5


def test_ode_step_rules():
    assert CharacteristicsConfig().n_steps(0.05) == 10
    assert CharacteristicsConfig().n_steps(2.0) == 200
    with pytest.raises(ValueError):
        CharacteristicsConfig(ode_step=0.5).n_steps(1.0)


def test_mass_loss_warning_is_raised_and_recorded():
    grid = PhaseSpaceGrid(-6, 6, -6, 6, 121, 121)
    psi = make_gaussian_qp(GaussianParams(1.0, 1.0, 0.0), grid)
    with pytest.warns(MassLossWarning):
        out = evolve_free(psi, 5.0)
    assert out.lost_mass > 0.01 and out.warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        renorm = evolve_free(psi, 5.0, renormalize=True)
    assert norm_squared(renorm) == pytest.approx(1.0, rel=1e-12)


def test_representation_is_checked(unit_gaussian):
    with pytest.raises(RepresentationError):
        evolve_free(to_lambda_p(unit_gaussian), 1.0)


def test_liouvillian_generates_the_remap(unit_gaussian):
    # d psi/dt = -i L psi for the free flow
    dt = 1e-4
    plus = evolve_free(unit_gaussian, dt).amplitudes
    minus = evolve_free(unit_gaussian, -dt).amplitudes
    lhs = (plus - minus) / (2 * dt)
    rhs = -1j * apply_liouvillian(unit_gaussian, HamiltonianSpec.free()).amplitudes
    assert np.abs(lhs - rhs).max() < 1e-5


def test_liouvillian_is_hermitian():
    grid = PhaseSpaceGrid(-8, 8, -8, 8, 128, 128)
    Q, P = grid.mesh()
    f = WaveFunction2D(grid, gaussian_qp(GaussianParams(1, 1, 0.3), Q - 0.5, P) * np.exp(0.4j * Q))
    g = WaveFunction2D(grid, gaussian_qp(GaussianParams(0.9, 1.2, -0.2), Q, P))
    H = HamiltonianSpec.quadratic(0.7)
    w = grid.dq * grid.ds
    lhs = np.sum(np.conj(f.amplitudes) * apply_liouvillian(g, H).amplitudes) * w
    rhs = np.sum(np.conj(apply_liouvillian(f, H).amplitudes) * g.amplitudes) * w
    assert abs(lhs - rhs) < 1e-8


def test_commensurate_grid_puts_feet_on_nodes(lattice_grid):
    assert lattice_grid.ds == pytest.approx(2 * lattice_grid.dq, rel=1e-14)
    Q, P = lattice_grid.mesh()
    foot = (Q - P * 1.5 - lattice_grid.q_min) / lattice_grid.dq
    assert np.abs(foot - np.round(foot)).max() < 1e-9
    with pytest.raises(ValueError):
        commensurate_grid(1.0, 1.0, 10, 2)


def test_decoupling_on_lattice(lattice_grid):
    Q, P = lattice_grid.mesh()
    F0 = gaussian_qp(GaussianParams(1.0, 1.0), Q, P)
    rep = decoupling_check(F0, 0.3 * Q * P + 0.5 * Q, lattice_grid, HamiltonianSpec.free(), 1.0)
    assert rep.modulus_diff < 1e-12 and rep.phase_diff < 1e-12
    assert rep.max_evolved_phase > 0.1


@settings(max_examples=15, deadline=None)
@given(t=st.floats(-1.5, 1.5), a=st.floats(0.7, 1.3), p_i=st.floats(-0.5, 0.5))
def test_unitarity_of_free_evolution(t, a, p_i):
    grid = PhaseSpaceGrid(-14, 14, -7, 7, 513, 257)
    psi = make_gaussian_qp(GaussianParams(a, 1.0, p_i), grid)
    out = evolve_free(psi, t)
    assert norm_squared(out) == pytest.approx(1.0, abs=1e-6)


@settings(max_examples=15, deadline=None)
@given(s=st.integers(-4, 4), u=st.integers(-4, 4))
def test_group_property_on_lattice(s, u):
    grid = commensurate_grid(10.0, 5.0, 81, 4)
    Q, P = grid.mesh()
    psi = WaveFunction2D(grid, gaussian_qp(GaussianParams(1, 1), Q, P) * np.exp(1j * Q * P))
    ts, tu = s / 4, u / 4
    two_step = apply_free_kernel(apply_free_kernel(psi, ts), tu)
    one_step = apply_free_kernel(psi, ts + tu)
    inner = np.abs(Q) < 10 - 1.25 * 5 - 1e-9
    assert np.abs(two_step.amplitudes - one_step.amplitudes)[inner].max() < 1e-12


def test_phase_invariance_on_generic_grid_is_interpolation_limited(default_grid):
    # off-lattice feet interpolate F exp(iG) and F differently; the gap is O(h^4)
    Q, P = default_grid.mesh()
    F = gaussian_qp(GaussianParams(1.0, 1.0, 0.3), Q, P)
    ref = evolve_free(WaveFunction2D(default_grid, F), 1.3).density()
    for G in (0.8 * Q - 1.3 * P, 0.6 * Q * P):
        dens = evolve_free(WaveFunction2D(default_grid, F * np.exp(1j * G)), 1.3).density()
        assert np.abs(dens - ref).max() < 1e-6
