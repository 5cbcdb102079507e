"""
Twist map steps, orbits, the generating function and the Euler-Lagrange residual
"""

import numpy as np
import pytest

from src.model.errors import OrbitOverflow
from src.model.fourier_series import FourierSeries
from src.model.twist_model import Configuration, CylinderState
from src.tools.twist import TwistTools


def test_shear_step():
    state = TwistTools.twist_step(FourierSeries.zeros(4), CylinderState(0.2, 0.5))
    assert (state.x, state.r) == pytest.approx((0.7, 0.5))


def test_standard_map_fixed_point():
    state = TwistTools.twist_step(TwistTools.standard_map(0.5), CylinderState(0.0, 0.0))
    assert (state.x, state.r) == pytest.approx((0.0, 0.0), abs=1e-16)


def test_step_preserves_invariant_curve(golden_model):
    x0 = 0.37
    state = TwistTools.twist_step(golden_model.f, CylinderState(x0, golden_model.gamma(x0)))
    g = x0 + golden_model.gamma(x0) + golden_model.f(x0)
    assert state.x == pytest.approx(g, abs=1e-10)
    assert state.r == pytest.approx(golden_model.gamma(g), abs=1e-10)


def test_orbit_is_reversible():
    f = TwistTools.standard_map(0.5)
    forward = TwistTools.orbit(f, CylinderState(0.1, 0.2), 50)
    end = CylinderState(*forward[-1])
    backward = TwistTools.orbit(f, end, 50, backward=True)
    np.testing.assert_allclose(backward[-1], forward[0], atol=1e-9)
    np.testing.assert_allclose(backward[::-1], forward, atol=1e-9)


def test_orbit_overflow():
    with pytest.raises(OrbitOverflow):
        TwistTools.orbit(FourierSeries.constant(1e8), CylinderState(0.0, 0.0), 20)


def test_jacobian_is_area_preserving_twist():
    f = TwistTools.standard_map(0.9)
    x = np.linspace(0.0, 1.0, 101)
    jac = TwistTools.jacobian(f, x)
    np.testing.assert_allclose(np.linalg.det(jac), 1.0, atol=1e-12)
    assert np.all(jac[:, 0, 1] > 0.0)


def test_segment_action_closed_forms():
    zero = FourierSeries.zeros(4)
    assert TwistTools.segment_action(zero, 0.0, Configuration(np.full(5, 0.3))) == 0.0
    assert TwistTools.segment_action(zero, 0.5, Configuration(0.5 * np.arange(6))) == 0.0


def test_segment_action_by_hand():
    lam, a = 0.5, 0.3
    f = TwistTools.standard_map(lam)
    points = np.array([0.1, 0.3, 0.6])

    def h(x0, x1):
        return 0.5 * (x1 - x0 - a) ** 2 - lam * np.cos(2.0 * np.pi * x0) / (4.0 * np.pi ** 2)

    expected = h(0.1, 0.3) + h(0.3, 0.6)
    assert TwistTools.segment_action(f, a, Configuration(points)) == pytest.approx(expected, abs=1e-15)
    assert TwistTools.generating_function(f, a, 0.1, 0.3) == pytest.approx(h(0.1, 0.3), abs=1e-15)


def test_generating_momenta_match_orbit():
    f = TwistTools.standard_map(0.7)
    a = 0.25
    start = CylinderState(0.13, 0.4)
    end = TwistTools.twist_step(f, start)
    first, second = TwistTools.generating_momenta(f, a, start.x, end.x)
    assert first == pytest.approx(start.r - a, abs=1e-14)
    assert second == pytest.approx(end.r - a, abs=1e-14)


def test_action_difference_is_windowed():
    f = TwistTools.standard_map(0.5)
    c1 = Configuration(0.3 * np.arange(12) + 0.05 * np.sin(np.arange(12)))
    moved = np.array(c1.points)
    moved[5] += 0.01
    c2 = c1.with_points(moved)
    full = TwistTools.segment_action(f, 0.3, c1) - TwistTools.segment_action(f, 0.3, c2)
    assert TwistTools.action_difference(f, 0.3, c1, c2) == pytest.approx(full, abs=1e-13)
    assert TwistTools.action_difference(f, 0.3, c1, c1) == 0.0


def test_euler_lagrange_vanishes_on_orbits():
    f = TwistTools.standard_map(0.5)
    orbit = TwistTools.orbit(f, CylinderState(0.2, 0.31), 40)
    residual = TwistTools.euler_lagrange_residual(f, TwistTools.configuration_from_orbit(orbit))
    assert np.max(np.abs(residual)) < 1e-12


def test_euler_lagrange_of_progressions():
    zero = FourierSeries.zeros(4)
    points = 0.25 * np.arange(6)
    assert np.all(TwistTools.euler_lagrange_residual(zero, Configuration(points)) == 0.0)

    delta = 1e-3
    points[3] += delta
    residual = TwistTools.euler_lagrange_residual(zero, Configuration(points))
    np.testing.assert_allclose(residual, [0.0, delta, -2.0 * delta, delta], atol=1e-15)


def test_zero_mean_warning(caplog):
    assert not TwistTools.check_mean(FourierSeries.constant(0.1))
    assert "mean" in caplog.text
