import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kvnlab.core import (GaussianParams, Grid1D, PhaseSpaceGrid, WaveFunction2D, gaussian_moments,
                         join_phase_modulus, make_gaussian_qp, make_gaussian_x, moment,
                         norm_squared, position_stats, split_phase_modulus)
from kvnlab.errors import DomainCoverageError, EvaluationError


def test_grid_spacing_and_weights():
    g = PhaseSpaceGrid(-1, 1, -2, 2, 5, 9)
    assert g.dq == 0.5 and g.ds == 0.5
    assert g.weights().sum() == pytest.approx(2 * 4)
    Q, P = g.mesh()
    assert Q.shape == (5, 9) and Q[1, 0] == -0.5 and P[0, 1] == -1.5


@pytest.mark.parametrize("args", [(1, 1, -1, 1, 4, 4), (0, 1, 1, -1, 4, 4), (0, 1, 0, 1, 1, 4)])
def test_grid_rejects_bad_extents(args):
    with pytest.raises(ValueError):
        PhaseSpaceGrid(*args)


def test_gaussian_is_normalized_with_textbook_moments(unit_gaussian):
    assert norm_squared(unit_gaussian) == pytest.approx(1.0, abs=1e-12)
    mom = gaussian_moments(unit_gaussian)
    assert mom["q_mean"] == pytest.approx(0.0, abs=1e-12)
    assert mom["p_mean"] == pytest.approx(0.5, abs=1e-10)
    assert mom["q_var"] == pytest.approx(0.5, abs=1e-8)
    assert mom["p_var"] == pytest.approx(0.5, abs=1e-8)


def test_gaussian_needs_six_sigma_coverage():
    grid = PhaseSpaceGrid(-3, 3, -8, 8, 64, 64)
    with pytest.raises(DomainCoverageError):
        make_gaussian_qp(GaussianParams(1.0, 1.0), grid)
    with pytest.raises(ValueError):
        GaussianParams(0.0, 1.0)


def test_moment_rejects_non_finite(unit_gaussian):
    with pytest.raises(EvaluationError):
        moment(unit_gaussian, lambda q, p: np.full_like(q, np.inf))
    assert moment(unit_gaussian, 3.0) == pytest.approx(3.0)


def test_wavefunction_is_read_only(unit_gaussian):
    with pytest.raises(ValueError):
        unit_gaussian.amplitudes[0, 0] = 1.0
    with pytest.raises(ValueError):
        WaveFunction2D(unit_gaussian.grid, np.zeros((3, 3)))


def test_one_dimensional_gaussian():
    psi = make_gaussian_x(1.0, 0.7, grid1d=Grid1D(-12, 12, 801))
    mean, var = position_stats(psi)
    assert mean == pytest.approx(0.0, abs=1e-12)
    assert var == pytest.approx(0.5, abs=1e-8)


def test_phase_below_floor_is_zeroed():
    amp = np.array([1.0, 1e-14, 1j])
    pair = split_phase_modulus(amp)
    assert pair.phase[1] == 0.0
    assert pair.phase[2] == pytest.approx(np.pi / 2)


@settings(max_examples=40, deadline=None)
@given(c1=st.floats(-3, 3), c2=st.floats(-3, 3), c3=st.floats(-1, 1))
def test_moments_are_blind_to_phase(c1, c2, c3):
    grid = PhaseSpaceGrid(-8, 8, -8, 8, 65, 65)
    psi = make_gaussian_qp(GaussianParams(1.0, 1.2, 0.3), grid)
    Q, P = grid.mesh()
    dressed = psi * np.exp(1j * (c1 * Q + c2 * P + c3 * Q * P))
    a, b = gaussian_moments(psi), gaussian_moments(dressed)
    for k in a:
        assert b[k] == pytest.approx(a[k], abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.floats(0.01, 5), st.floats(-3, 3)), min_size=2, max_size=30))
def test_split_join_round_trip(vals):
    amp = np.array([r * np.exp(1j * th) for r, th in vals])
    pair = split_phase_modulus(amp)
    assert np.allclose(join_phase_modulus(pair), amp, atol=1e-12 * np.abs(amp).max())
