import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kvnlab.classical import commensurate_grid
from kvnlab.core import GaussianParams
from kvnlab.errors import DomainError, GeometryWarning
from kvnlab.quantum import QuantumParams
from kvnlab.twoslit import (FRINGE_WINDOW, ProbabilityCurve, SlitGeometry, SlitsOpen,
                            analyze_minima, classical_two_slit, classical_two_slit_grid, cutoff,
                            longitudinal_clock, momentum_windows, quantum_two_slit, slit_mask)

GEOM = SlitGeometry(1.0, 0.1, 1.0, 2.0)
PARAMS = GaussianParams(1.0, 1.0)
X = np.linspace(-6, 6, 241)


def test_geometry_invariants():
    assert longitudinal_clock(GEOM) == (1.0, 2.0)
    assert longitudinal_clock(SlitGeometry(1.0, 0.1, 1.0, 2.0, p_y0=2.0)) == (0.5, 1.0)
    with pytest.raises(ValueError, match="delta < x_A"):
        SlitGeometry(0.1, 0.1, 1.0, 2.0)
    with pytest.raises(ValueError, match="y_F < y_S"):
        SlitGeometry(1.0, 0.1, 2.0, 2.0)


def test_cutoffs_are_idempotent_and_disjoint():
    x = np.linspace(-2, 2, 4001)
    c1 = slit_mask(x, GEOM, SlitsOpen.ONLY_FIRST)
    c2 = slit_mask(x, GEOM, SlitsOpen.ONLY_SECOND)
    assert np.array_equal(c1 * c1, c1) and np.array_equal(c2 * c2, c2)
    assert not np.any(c1 * c2)
    assert np.array_equal(slit_mask(x, GEOM), c1 + c2)
    assert cutoff(0.0, 0.0, 1.0) == 1 and cutoff(1.0, 0.0, 1.0) == 0


def test_momentum_windows():
    (lo, hi), = momentum_windows(0.5, GEOM, SlitsOpen.ONLY_FIRST)
    assert (lo, hi) == pytest.approx((-0.6, -0.4))
    assert len(momentum_windows(0.0, GEOM)) == 2


def test_classical_additivity_and_shape():
    both = classical_two_slit(PARAMS, GEOM, X)
    one = classical_two_slit(PARAMS, GEOM, X, open_=SlitsOpen.ONLY_FIRST)
    two = classical_two_slit(PARAMS, GEOM, X, open_=SlitsOpen.ONLY_SECOND)
    assert np.abs(both.raw - one.raw - two.raw).max() < 1e-12
    assert np.sum(0.5 * (both.P[1:] + both.P[:-1]) * np.diff(X)) == pytest.approx(1.0)
    assert analyze_minima(both, (-6, 6)).count <= 1


def test_symmetry():
    c = classical_two_slit(PARAMS, GEOM, X)
    q = quantum_two_slit(1.0, GEOM, X)
    assert np.abs(c.P - c.P[::-1]).max() < 1e-8
    assert np.abs(q.P - q.P[::-1]).max() < 1e-8


@settings(max_examples=10, deadline=None)
@given(c=st.floats(-5, 5), d=st.floats(-5, 5))
def test_classical_phase_invariance(c, d):
    x = np.linspace(-4, 4, 41)
    plain = classical_two_slit(PARAMS, GEOM, x)
    dressed = classical_two_slit(PARAMS, GEOM, x, G=lambda q, p: c * np.sin(q) * p + d * q * q)
    assert np.abs(plain.raw - dressed.raw).max() < 1e-12


def test_grid_pipeline_agrees_with_window_reduction():
    grid = commensurate_grid(10.0, 4.0, 421, 1)
    g_curve = classical_two_slit_grid(PARAMS, GEOM, grid)
    ref = classical_two_slit(PARAMS, GEOM, grid.q)
    assert np.abs(g_curve.P - ref.P).max() < 1e-3


def test_quantum_interference_and_cross_term():
    both = quantum_two_slit(1.0, GEOM, X)
    one = quantum_two_slit(1.0, GEOM, X, open_=SlitsOpen.ONLY_FIRST)
    two = quantum_two_slit(1.0, GEOM, X, open_=SlitsOpen.ONLY_SECOND)
    assert np.abs(both.raw - one.raw - two.raw).max() > 1e-3
    assert np.allclose(both.raw, one.raw + two.raw + both.cross, atol=1e-15)
    assert analyze_minima(both, (-6, 6)).count >= 3


def test_fringe_spacing_scales_inversely_with_separation():
    x = np.linspace(*FRINGE_WINDOW, 3801)
    narrow = analyze_minima(quantum_two_slit(1.0, SlitGeometry(0.5, 0.1, 1, 2), x), FRINGE_WINDOW)
    wide = analyze_minima(quantum_two_slit(1.0, SlitGeometry(1.0, 0.1, 1, 2), x), FRINGE_WINDOW)
    assert wide.mean_spacing / narrow.mean_spacing == pytest.approx(0.5, rel=0.1)


def test_flux_floor_warning():
    far = SlitGeometry(20.0, 0.1, 1.0, 2.0)
    with pytest.warns(GeometryWarning):
        c = classical_two_slit(PARAMS, far, np.linspace(-1, 1, 5))
    assert c.warnings


def test_mass_mismatch_is_rejected():
    with pytest.raises(ValueError):
        quantum_two_slit(1.0, GEOM, X, QuantumParams(m=2.0))


def test_minima_on_squared_cosine():
    k = 3.0
    x = np.linspace(0, 2 * np.pi / k, 2001)
    curve = ProbabilityCurve(x, np.cos(k * x)**2, np.cos(k * x)**2)
    rep = analyze_minima(curve, (0, 2 * np.pi / k))
    assert rep.count == 2
    assert rep.mean_spacing == pytest.approx(np.pi / k, rel=1e-3)
    with pytest.raises(DomainError):
        analyze_minima(curve, (-1, 1))
