import math

import numpy as np
import pytest
from scipy.optimize import brentq

from src.core.basis import RadialGrid, SturmianParams, sturmian_eval
from src.core.exceptions import DomainError, SingularCoefficientError
from src.core.jacobi import JacobiOperator
from src.core.model import Channel, EnergyPoint


@pytest.fixture
def bound_op(hydrogen):
    return JacobiOperator(hydrogen, 1.0, -0.3)


class TestElements:
    def test_accepts_energy_point(self, hydrogen, constants):
        op = JacobiOperator(hydrogen, 1.0, EnergyPoint.from_binding(-0.3, constants))
        assert op.h_element(2, 3) == JacobiOperator(hydrogen, 1.0, -0.3).h_element(2, 3)

    def test_diagonal_formula(self, hydrogen, constants):
        op = JacobiOperator(hydrogen, 1.3, -0.2)
        e_over_hc = constants.mu - 0.2 * constants.alpha
        k2 = constants.k_squared(-0.2)
        d = (k2 + 1.3 ** 2) / 2.6
        for n in range(5):
            nu = hydrogen.u + n + 1
            expected = 2 * constants.alpha * 1 * e_over_hc - 2 * nu * 1.3 + 2 * nu * d
            assert op.h_element(n, n) == pytest.approx(expected, rel=1e-12)
            assert op.h_element(n, n + 1) == pytest.approx(
                -d * math.sqrt((n + 1) * (n + 2 * hydrogen.u + 2)), rel=1e-14)
            assert op.h_element(n + 1, n) == pytest.approx(
                -d * math.sqrt((n + 1) * (n + 1 + 2 * hydrogen.u + 1)), rel=1e-14)

    def test_symmetric_and_tridiagonal(self, bound_op):
        for n in range(500):
            assert bound_op.h_element(n, n + 1) == bound_op.h_element(n + 1, n)
            assert bound_op.h_element(n, n + 2) == 0.0

    def test_real_at_real_energy(self, hydrogen):
        for channel in (hydrogen, Channel.klein_gordon(1, 2), Channel.dirac(92, 5, "minus")):
            op = JacobiOperator(channel, 0.7, -0.1)
            assert all(isinstance(op.h_element(n, m), float) for n in range(4) for m in range(4))

    def test_complex_energy(self, hydrogen):
        op = JacobiOperator(hydrogen, 1.0, -0.3 + 0.01j)
        assert op.is_complex
        assert op.h_element(1, 2) == op.h_element(2, 1)
        assert op.h_element(0, 0).imag != 0

    def test_rejects_bad_input(self, hydrogen):
        with pytest.raises(DomainError):
            JacobiOperator(hydrogen, 0.0, -0.3)
        with pytest.raises(DomainError):
            JacobiOperator(hydrogen, 1.0, -0.3).h_element(-1, 0)

    def test_dense_and_banded_truncations_agree(self, bound_op):
        dense = bound_op.truncated(12)
        bands = bound_op.truncated_bands(12)
        np.testing.assert_allclose(bands[1], np.diag(dense), rtol=1e-15)
        np.testing.assert_allclose(bands[0, 1:], np.diag(dense, 1), rtol=1e-15)
        np.testing.assert_allclose(bands[2, :-1], np.diag(dense, -1), rtol=1e-15)
        np.testing.assert_array_equal(dense, dense.T)


class TestDiagonalCase:
    def test_off_diagonals_vanish(self, diagonal_channel):
        op = JacobiOperator(diagonal_channel, 2.0, -2.0)
        assert op.is_diagonal
        assert all(op.h_element(n, n + 1) == 0 for n in range(50))

    def test_coefficients_undefined(self, diagonal_channel):
        op = JacobiOperator(diagonal_channel, 2.0, -2.0)
        with pytest.raises(SingularCoefficientError):
            op.cf_coefficients(1)

    @pytest.mark.parametrize("n", range(0, 21))
    def test_diagonal_quantization_reproduces_sommerfeld(self, hydrogen, n):
        u = hydrogen.u
        constants = hydrogen.constants

        def mismatch(binding):
            # D = 0 fixes eta = kappa; the n-th diagonal then vanishes at the level
            kappa = math.sqrt(-constants.k_squared(binding))
            return 2 * (constants.mass + constants.alpha ** 2 * binding) - 2 * (u + n + 1) * kappa

        seed = hydrogen.exact_binding(n)
        root = brentq(mismatch, 1.01 * seed, 0.99 * seed, xtol=1e-18, rtol=1e-15)
        assert root == pytest.approx(seed, rel=1e-12)

        op = JacobiOperator(hydrogen, hydrogen.energy_scale(seed), seed)
        assert abs(op.diagonal(n)) < 1e-12
        assert abs(op.d) < 1e-12


class TestContinuedFractionCoefficients:
    def test_leading_index_is_one(self, bound_op):
        with pytest.raises(DomainError):
            bound_op.cf_coefficients(0)

    def test_closed_form_of_a(self, bound_op):
        c = 2 * bound_op.u + 1
        for i in range(1, 60):
            a, _ = bound_op.cf_coefficients(i)
            closed = -math.sqrt(i * (i + c)) / math.sqrt((i + 1) * (i + c + 1))
            assert a == pytest.approx(closed, abs=1e-15)

    def test_minus_a_increases_to_one(self, bound_op):
        values = np.array([-bound_op.cf_coefficients(i)[0] for i in range(1, 10001)])
        assert np.all((values > 0) & (values < 1))
        assert np.all(np.diff(values) > 0)
        assert values[-1] == pytest.approx(1.0, abs=1e-3)

    def test_b_from_elements(self, bound_op):
        for i in range(1, 20):
            _, b = bound_op.cf_coefficients(i)
            assert b == pytest.approx(-bound_op.h_element(i, i) / bound_op.h_element(i, i + 1), rel=1e-15)


def test_matrix_elements_match_sturmian_quadrature():
    """
    <S_n|H|S_m> by quadrature with finite-difference second derivatives.

    H = d2/dr2 - u(u+1)/r^2 + 2 alpha Z (E/hbar c)/r + k^2.
    """
    channel = Channel.dirac(1, 3)
    eta, binding = 1.0, -0.3
    op = JacobiOperator(channel, eta, binding)
    params = SturmianParams.for_channel(channel, eta)
    grid = RadialGrid.gauss_laguerre(params, size=48)
    r = grid.nodes
    h = 1e-4 * r

    def apply_h(m):
        s = sturmian_eval(m, params, r)
        second = (sturmian_eval(m, params, r + h) - 2 * s + sturmian_eval(m, params, r - h)) / h ** 2
        return second - params.u * (params.u + 1) / r ** 2 * s + op.coupling / r * s + op.k_squared * s

    scale = max(abs(op.h_element(n, n)) for n in range(6))
    for m in range(6):
        h_sm = apply_h(m)
        for n in range(6):
            value = grid.integrate(sturmian_eval(n, params, r) * h_sm)
            assert value == pytest.approx(op.h_element(n, m), abs=1e-5 * scale)
