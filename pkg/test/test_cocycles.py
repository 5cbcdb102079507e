"""
Cocycle products, Lyapunov exponents, rotation numbers, parabolic reduction and the dichotomy test
"""

import math

import numpy as np
import pytest

from src.model.circle_diffeo import CircleDiffeo
from src.model.cocycle import MatrixCocycle, MatrixFunction
from src.model.errors import (
    InconclusiveDichotomy, PositiveNu0, ResidualTooLarge, SingularConjugator, SmallDivisorBreakdown, StripTooWide,
    WindingNonzero,
)
from src.model.fourier_series import FourierSeries
from src.model.frequency import Frequency
from src.tools.cocycles import CocyclesTools
from src.tools.common_tools import CommonTools
from src.tools.curves import CurvesTools

ALPHA = Frequency.golden().value


def constant_cocycle(matrix):
    return MatrixCocycle(MatrixFunction.constant(matrix), alpha=ALPHA)


def schrodinger(model, E):
    return CocyclesTools.schrodinger_cocycle(model.V, E, model.alpha, strip_h0=model.strip_h0)


# ---------------------------------------------------------------------- builders

def test_free_builders(free_model):
    x = CommonTools.uniform_grid(16)
    derivative = CocyclesTools.derivative_cocycle(free_model)
    np.testing.assert_allclose(derivative(x), np.broadcast_to([[1.0, 1.0], [0.0, 1.0]], (16, 2, 2)), atol=1e-14)
    edge = schrodinger(free_model, 0.0)
    np.testing.assert_allclose(edge(x), np.broadcast_to([[2.0, -1.0], [1.0, 0.0]], (16, 2, 2)), atol=1e-14)


def test_cocycles_are_unimodular(golden_model):
    x = CommonTools.uniform_grid(64)
    np.testing.assert_allclose(CocyclesTools.derivative_cocycle(golden_model).matrix_fn.determinant(x), 1.0,
                               atol=1e-12)
    np.testing.assert_allclose(schrodinger(golden_model, -0.7).matrix_fn.determinant(x), 1.0, atol=1e-14)


# ---------------------------------------------------------------------- iterates

def test_free_derivative_iterates(free_model):
    result = CocyclesTools.cocycle_iterates(CocyclesTools.derivative_cocycle(free_model), 20)
    for k in (1, 5, 20):
        np.testing.assert_allclose(result.products[k - 1], [[1.0, k], [0.0, 1.0]], atol=1e-12)
    assert not result.truncated


def test_iterates_stay_under_reduction_bound(golden_model):
    reduction = CocyclesTools.parabolic_reduce(golden_model)
    n = 10000
    result = CocyclesTools.cocycle_iterates(schrodinger(golden_model, 0.0), n, phases=16)
    k = np.arange(1, n + 1)
    z_sup = CocyclesTools.reduction_norm_bound(reduction, 0)
    bounds = z_sup * (1.0 + k * abs(reduction.nu0))
    assert np.all(result.sup_norms <= 1.01 * bounds)
    assert result.sup_norms[-1] <= 1.01 * CocyclesTools.reduction_norm_bound(reduction, n)


def test_free_edge_grows_linearly(free_model):
    result = CocyclesTools.cocycle_iterates(schrodinger(free_model, 0.0), 2000, phases=4)
    assert CocyclesTools.sup_norm_growth_fit(result) < 2.5
    assert result.sup_norms[-1] > 1000.0


# ------------------------------------------------------------------- Lyapunov

def test_lyapunov_of_hyperbolic_constant():
    assert CocyclesTools.lyapunov_exponent(constant_cocycle([[2.0, 0.0], [0.0, 0.5]]), 1000) == pytest.approx(
        math.log(2.0), abs=1e-10)


def test_lyapunov_of_parabolic_constant():
    n = 1000
    assert CocyclesTools.lyapunov_exponent(constant_cocycle([[1.0, 1.0], [0.0, 1.0]]), n) <= 2.0 * math.log(n) / n


def test_lyapunov_outside_spectrum(golden_model):
    assert CocyclesTools.lyapunov_exponent(schrodinger(golden_model, 1.0), 5000) > 1e-3


def test_complexified_phase_must_stay_in_strip(golden_model):
    with pytest.raises(StripTooWide):
        CocyclesTools.lyapunov_exponent(schrodinger(golden_model, 0.0), 100, delta=2.0 * golden_model.strip_h0)


def test_lyapunov_is_conjugation_invariant(golden_model):
    c = schrodinger(golden_model, 1.0)
    B = MatrixFunction((FourierSeries.constant(1.0), FourierSeries.cosine(0.05, 1, 1),
                        FourierSeries.constant(0.0), FourierSeries.constant(1.0)))
    conjugated = CocyclesTools.conjugate_cocycle(c, B, force=True)
    n = 100000
    original = CocyclesTools.lyapunov_exponent(c, n, phases=4)
    transformed = CocyclesTools.lyapunov_exponent(conjugated, n, phases=4)
    assert abs(original - transformed) < 2e-6


# -------------------------------------------------------------------- rotation

def test_rotation_requires_zero_winding():
    entries = (FourierSeries.cosine(1.0, 1, 1), -FourierSeries.sine(1.0, 1, 1),
               FourierSeries.sine(1.0, 1, 1), FourierSeries.cosine(1.0, 1, 1))
    c = MatrixCocycle(MatrixFunction(entries), alpha=ALPHA)
    with pytest.raises(WindingNonzero):
        CocyclesTools.fibered_rotation_number(c, 100)


def test_free_rotation_number_at_band_center(free_model):
    assert CocyclesTools.fibered_rotation_number(schrodinger(free_model, -2.0), 1000) == pytest.approx(0.25,
                                                                                                     abs=1e-12)


def test_rotation_number_vanishes_at_the_edge(golden_model):
    assert abs(CocyclesTools.fibered_rotation_number(schrodinger(golden_model, 0.0), 100000)) < 1e-4


def test_rotation_number_decreases_with_energy(golden_model):
    values = [CocyclesTools.fibered_rotation_number(schrodinger(golden_model, E), 20000) for E in (-3.0, -2.0, -1.0, -0.5)]
    assert all(later <= earlier + 1e-4 for earlier, later in zip(values, values[1:]))
    assert all(0.0 <= value <= 0.5 for value in values)


# ------------------------------------------------------------------ conjugation

def test_identity_conjugation(golden_model):
    c = schrodinger(golden_model, -0.3)
    conjugated = CocyclesTools.conjugate_cocycle(c, MatrixFunction.constant(np.eye(2)))
    x = CommonTools.uniform_grid(256)
    assert CommonTools.sup_distance(conjugated(x), c(x)) < 1e-12


def test_singular_conjugator(golden_model):
    with pytest.raises(SingularConjugator):
        CocyclesTools.conjugate_cocycle(schrodinger(golden_model, 0.0), MatrixFunction.constant(np.zeros((2, 2))))


def test_tangent_frame_triangularizes_derivative_cocycle(golden_model):
    """[[1, 0], [gamma', 1]] takes D psi to [[g', 1], [0, 1/g']]"""
    gamma_prime = golden_model.gamma.derivative()
    Z1 = MatrixFunction((FourierSeries.constant(1.0), FourierSeries.constant(0.0), gamma_prime,
                         FourierSeries.constant(1.0)))
    conjugated = CocyclesTools.conjugate_cocycle(CocyclesTools.derivative_cocycle(golden_model), Z1, force=True)
    x = CommonTools.uniform_grid(512)
    g_prime = 1.0 + gamma_prime(x) + golden_model.f.derivative()(x)
    values = conjugated(x)
    assert CommonTools.sup_distance(values[:, 0, 0], g_prime) < 1e-9
    assert CommonTools.sup_distance(values[:, 0, 1], 1.0) < 1e-9
    assert CommonTools.sup_distance(values[:, 1, 0], 0.0) < 1e-9
    assert CommonTools.sup_distance(values[:, 1, 1], 1.0 / g_prime) < 1e-9


# -------------------------------------------------------- cohomological equation

def test_cohomological_closed_form():
    nu = FourierSeries.cosine(1.0, 1, 4)
    mu = CocyclesTools.solve_cohomological(nu, ALPHA)
    assert CocyclesTools.cohomological_residual(mu, nu, ALPHA) < 1e-12
    assert mu.mean == 0.0
    x = CommonTools.uniform_grid(64)
    expected = np.real(np.exp(2j * np.pi * x) / (np.exp(2j * np.pi * ALPHA) - 1.0))
    np.testing.assert_allclose(mu(x), expected, atol=1e-14)


def test_cohomological_of_constant():
    mu = CocyclesTools.solve_cohomological(FourierSeries.constant(3.0, 4), ALPHA)
    assert mu.sup_norm() == 0.0


def test_small_divisor_breakdown():
    with pytest.raises(SmallDivisorBreakdown) as info:
        CocyclesTools.solve_cohomological(FourierSeries.cosine(1.0, 2, 4), 0.5)
    assert info.value.k == 2


def test_noise_mode_on_small_divisor_is_dropped(caplog):
    nu = FourierSeries.cosine(1.0, 1, 4) + FourierSeries.cosine(1e-14, 2, 4)
    nu = FourierSeries(nu.coeffs, tail=1e-10)
    mu = CocyclesTools.solve_cohomological(nu, 0.5)
    assert mu.coeff(2) == 0.0
    assert mu.coeff(1) == pytest.approx(-0.25)
    assert "divisor floor" in caplog.text


# ------------------------------------------------------------ parabolic reduction

def test_free_reduction(free_model):
    reduction = CocyclesTools.parabolic_reduce(free_model)
    assert reduction.nu0 == pytest.approx(-1.0, abs=1e-14)
    np.testing.assert_allclose(reduction.B0, [[1.0, -1.0], [0.0, 1.0]], atol=1e-14)
    assert reduction.residual < 1e-12


def test_golden_reduction(golden_model):
    reduction = CocyclesTools.parabolic_reduce(golden_model)
    assert reduction.nu0 < 0.0
    assert reduction.residual < 1e-8
    assert reduction.z_form_residual < 1e-10
    assert reduction.cohomological_residual < 1e-10
    x = CommonTools.uniform_grid(512)
    np.testing.assert_allclose(reduction.Z.determinant(x), 1.0, atol=1e-10)
    assert np.all(reduction.Z(x)[:, 0, 0] > 0.0)


def test_reduction_residual_shrinks_with_modes():
    residuals = {}
    for n in (16, 32):
        phi = CircleDiffeo.from_harmonics({"c1": 0.3}, n_modes=n)
        model = CurvesTools.construct_from_conjugacy(Frequency.golden(), phi, n_modes=n, grid=2048,
                                                     certify=False, force=True)
        residuals[n] = CocyclesTools.parabolic_reduce(model, tol=np.inf, force=True).residual
    assert residuals[32] < residuals[16] / 10.0


def test_reduction_tolerance(golden_model):
    with pytest.raises(ResidualTooLarge):
        CocyclesTools.parabolic_reduce(golden_model, tol=1e-30)


def test_q0_normalize():
    Q0, check = CocyclesTools.q0_normalize(-4.0)
    assert np.linalg.det(Q0) == pytest.approx(1.0, abs=1e-14)
    assert check < 1e-14
    with pytest.raises(PositiveNu0):
        CocyclesTools.q0_normalize(0.1)
    with pytest.raises(PositiveNu0):
        CocyclesTools.q0_normalize(0.0)


def test_perturbation_profile_is_first_order_term(golden_model):
    """Z0(y + alpha)^-1 (S_eps - S_0)(y) Z0(y) = eps P1(y), exactly linear in eps"""
    reduction = CocyclesTools.parabolic_reduce(golden_model)
    profile = CocyclesTools.perturbation_profile(golden_model, reduction)
    Q0, _ = CocyclesTools.q0_normalize(reduction.nu0)
    y = CommonTools.uniform_grid(256)
    alpha = golden_model.alpha
    eps = 1e-3
    Z0 = reduction.Z(y) @ Q0
    Z0_next = CommonTools.inverse_2x2(reduction.Z(y + alpha) @ Q0)
    difference = Z0_next @ (schrodinger(golden_model, eps)(y) - schrodinger(golden_model, 0.0)(y)) @ Z0
    assert CommonTools.sup_distance(difference / eps, profile.P1(y)) < 1e-9
    assert profile.strip_width == pytest.approx(golden_model.strip_h0 / 2.0)
    assert profile.strip_norm >= profile.sup_norm > 0.0
    # P1 is analytic well past h0/2, so the strip sup stays of the order of the real one
    assert profile.strip_norm < 20.0 * profile.sup_norm


# -------------------------------------------------------------- identity checks

def test_identity_checks(golden_model):
    assert CocyclesTools.bloch_section_check(golden_model) < 1e-10
    assert CocyclesTools.potential_identity_residual(golden_model) < 1e-9
    assert CocyclesTools.jacobi_section_residual(golden_model) < 1e-9
    assert CocyclesTools.m_conjugacy_residual(golden_model) < 1e-12


# -------------------------------------------------------------------- dichotomy

def test_dichotomy_of_constants():
    assert CocyclesTools.uh_test(constant_cocycle([[2.5, -1.0], [1.0, 0.0]])).hyperbolic
    assert not CocyclesTools.uh_test(constant_cocycle([[1.0, -1.0], [0.0, 1.0]])).hyperbolic


def test_dichotomy_above_the_edge(golden_model):
    for E in (0.005, 0.01, 0.05):
        result = CocyclesTools.uh_test(schrodinger(golden_model, E))
        assert result.hyperbolic
        assert result.margin > 0.0
    assert not CocyclesTools.uh_test(schrodinger(golden_model, 0.0)).hyperbolic


def test_weak_hyperbolicity_is_inconclusive():
    c = constant_cocycle([[math.exp(0.005), 0.0], [0.0, math.exp(-0.005)]])
    with pytest.raises(InconclusiveDichotomy):
        CocyclesTools.uh_test(c, n=1000)
