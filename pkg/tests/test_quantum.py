import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kvnlab.core import Grid1D, make_gaussian_x, position_stats
from kvnlab.errors import DomainError, ResolutionError
from kvnlab.quadrature import adaptive_gauss_legendre, composite_nodes, oscillatory_nodes
from kvnlab.quantum import (QuantumParams, evolve_gaussian_free, free_kernel,
                            gaussian_free_closed_form, gaussian_variance, madelung_residual,
                            propagate_kernel)

GRID = Grid1D(-20, 20, 801)


def test_closed_form_reduces_to_initial_state():
    x = GRID.x
    psi0 = make_gaussian_x(1.3, 0.4, grid1d=GRID)
    assert np.abs(gaussian_free_closed_form(x, 1.3, 0.4, 0.0) - psi0.amplitudes).max() < 1e-12


def test_spreading_law():
    for t in (0.0, 1.0, 2.0, 3.0):
        _, var = position_stats(evolve_gaussian_free(1.0, 0.0, t, grid1d=GRID))
        assert var == pytest.approx(gaussian_variance(1.0, t), abs=1e-8)
    assert gaussian_variance(1.0, 2.0) == pytest.approx(2.5)


def test_mean_moves_with_group_velocity():
    mean, var = position_stats(evolve_gaussian_free(1.0, 1.0, 2.0, grid1d=GRID))
    assert mean == pytest.approx(2.0, abs=1e-10) and var == pytest.approx(2.5, abs=1e-8)


def test_kernel_propagation_matches_closed_form():
    psi0 = make_gaussian_x(1.0, 0.5, grid1d=GRID)
    out = propagate_kernel(psi0, 0.0, 1.5)
    ref = gaussian_free_closed_form(GRID.x, 1.0, 0.5, 1.5)
    inner = np.abs(GRID.x) < 10
    assert np.abs(out.amplitudes - ref)[inner].max() < 1e-6


def test_kernel_semigroup():
    psi0 = make_gaussian_x(1.0, 0.0, grid1d=GRID)
    two = propagate_kernel(propagate_kernel(psi0, 0.0, 0.6), 0.6, 1.4)
    one = propagate_kernel(psi0, 0.0, 1.4)
    inner = np.abs(GRID.x) < 8
    assert np.abs(two.amplitudes - one.amplitudes)[inner].max() < 1e-6


def test_kernel_rejects_backward_time():
    with pytest.raises(DomainError):
        free_kernel(0.0, 1.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        propagate_kernel(make_gaussian_x(1.0, grid1d=GRID), 1.0, 0.5)


def test_kernel_composition_on_steepest_descent_contour():
    # int K(x2,t2|x,t1) K(x,t1|x1,t0) dx = K(x2,t2|x1,t0) along x = s e^{i pi/4}
    qp = QuantumParams()
    rot = np.exp(1j * math.pi / 4)
    s, w = composite_nodes(-12, 12, 48)
    x1, x2 = 0.3, -0.7
    lhs = np.sum(w * rot * free_kernel(x2, 2.0, s * rot, 0.8, qp) * free_kernel(s * rot, 0.8, x1, 0.0, qp))
    assert abs(lhs - free_kernel(x2, 2.0, x1, 0.0, qp)) < 1e-10


def test_resolution_error_when_nodes_explode():
    with pytest.raises(ResolutionError):
        oscillatory_nodes(-100, 100, 1e4)


def test_adaptive_quadrature_on_fresnel_type_integrand():
    val = adaptive_gauss_legendre(lambda x: np.cos(40 * x * x), 0.0, 1.0)
    from scipy.special import fresnel
    S, C = fresnel(math.sqrt(80 / math.pi))
    assert val == pytest.approx(math.sqrt(math.pi / 80) * C, rel=1e-9)


def test_madelung_residuals_and_quantum_potential():
    grid = Grid1D(-12, 12, 2049)
    dt = 1e-3
    snaps = [evolve_gaussian_free(1.0, 0.3, 1.0 + k * dt, grid1d=grid) for k in (-1, 0, 1)]
    res = madelung_residual(snaps, dt)
    assert res.r_S < 1e-2 and res.r_A < 1e-2
    assert res.quantum_potential_max > 0.1


def test_variance_diverges_as_width_shrinks():
    # at fixed t the hbar^2 t^2/(m^2 a^4) term dominates and grows as a^-2
    vals = [gaussian_variance(a, 1.0) for a in (0.5, 0.25, 0.125)]
    assert vals[1] > 2 * vals[0] and vals[2] > 2 * vals[1]


@settings(max_examples=20, deadline=None)
@given(a=st.floats(0.6, 2.0), p_i=st.floats(-1, 1), t=st.floats(0, 3))
def test_closed_form_stays_normalized(a, p_i, t):
    grid = Grid1D(-40, 40, 4001)
    amp = gaussian_free_closed_form(grid.x, a, p_i, t)
    w = grid.weights()
    assert np.sum(np.abs(amp)**2 * w) == pytest.approx(1.0, abs=1e-9)
