import math

import mpmath
import numpy as np
import pytest
from scipy.special import eval_genlaguerre

from src.core.basis import (
    RadialGrid,
    SturmianParams,
    laguerre_general,
    overlap_element,
    overlap_matrix,
    overlap_numeric,
    sturmian_eval,
    sturmian_ode_residual,
)
from src.core.exceptions import DomainError, QuadratureError


def laguerre_series(n, a, x):
    """Explicit finite series with Gamma-function coefficients."""
    return sum(
        (-1) ** i * math.gamma(n + a + 1) / (math.gamma(n - i + 1) * math.gamma(a + i + 1))
        * x ** i / math.factorial(i)
        for i in range(n + 1)
    )


class TestLaguerre:
    def test_base_cases(self):
        assert laguerre_general(0, 0.7, 3.2) == 1.0
        assert laguerre_general(1, 0.7, 3.2) == pytest.approx(1 + 0.7 - 3.2)

    def test_series_oracle(self):
        assert laguerre_general(3, 0.5, 2.0) == pytest.approx(laguerre_series(3, 0.5, 2.0), rel=1e-13)

    @pytest.mark.parametrize("n", [2, 5, 10, 20])
    @pytest.mark.parametrize("a", [0.0, 0.5, 2.86, -0.5])
    def test_matches_scipy(self, n, a):
        x = np.linspace(0.0, 40.0, 81)
        expected = eval_genlaguerre(n, a, x)
        np.testing.assert_allclose(laguerre_general(n, a, x), expected,
                                   rtol=1e-10, atol=1e-12 * np.max(np.abs(expected)))

    def test_array_shape_preserved(self):
        x = np.ones((3, 4))
        assert laguerre_general(4, 1.0, x).shape == (3, 4)

    def test_invalid_arguments(self):
        with pytest.raises(DomainError):
            laguerre_general(-1, 0.0, 1.0)
        with pytest.raises(DomainError):
            laguerre_general(2, -1.0, 1.0)


class TestSturmian:
    def test_ground_function_at_unit_radius(self):
        value = sturmian_eval(0, SturmianParams(eta=1.0, u=0.0), 1.0)
        assert value == pytest.approx(2.0 / math.e, rel=1e-15)
        assert value == pytest.approx(0.7357588823, abs=1e-10)

    def test_vanishes_like_power_at_origin(self):
        params = SturmianParams(eta=1.3, u=0.4)
        small = np.array([1e-6, 1e-7])
        ratios = sturmian_eval(2, params, small) / small ** (params.u + 1)
        assert ratios[0] == pytest.approx(ratios[1], rel=1e-5)

    def test_multiprecision_oracle(self):
        n, u, eta, r = 5, 0.93, 2.0, 3.0
        with mpmath.workdps(40):
            x = 2 * mpmath.mpf(eta) * r
            norm = mpmath.sqrt(mpmath.gamma(n + 1) / mpmath.gamma(n + 2 * mpmath.mpf(u) + 2))
            expected = norm * x ** (u + 1) * mpmath.exp(-eta * r) * mpmath.laguerre(n, 2 * u + 1, x)
        value = sturmian_eval(n, SturmianParams(eta=eta, u=u), r)
        assert value == pytest.approx(float(expected), rel=1e-11)

    def test_high_index_stays_finite(self):
        values = sturmian_eval(100, SturmianParams(eta=1.0, u=0.5), np.linspace(0.1, 200.0, 50))
        assert np.all(np.isfinite(values))

    @pytest.mark.parametrize("r", [0.0, -1.0])
    def test_rejects_nonpositive_radius(self, r):
        with pytest.raises(DomainError):
            sturmian_eval(0, SturmianParams(eta=1.0, u=0.0), r)

    @pytest.mark.parametrize("eta, u", [(0.0, 0.0), (-1.0, 0.0), (1.0, -1.0), (1.0, -2.0)])
    def test_invalid_params(self, eta, u):
        with pytest.raises(DomainError):
            SturmianParams(eta=eta, u=u)


class TestOverlap:
    def test_diagonal_example(self):
        assert overlap_element(0, 0, SturmianParams(eta=0.5, u=0.0)) == pytest.approx(2.0)

    def test_off_diagonal_example(self):
        expected = -math.sqrt(2 * (1 + 2 * 0.9 + 2)) / (2 * 1.3)
        assert overlap_element(1, 2, SturmianParams(eta=1.3, u=0.9)) == pytest.approx(expected, rel=1e-15)

    def test_tridiagonal_and_exactly_symmetric(self):
        params = SturmianParams(eta=0.8, u=0.37)
        for n in range(201):
            for m in range(max(0, n - 4), min(201, n + 5)):
                assert overlap_element(n, m, params) == overlap_element(m, n, params)
                if abs(n - m) >= 2:
                    assert overlap_element(n, m, params) == 0.0
        assert overlap_element(0, 200, params) == 0.0

    @pytest.mark.parametrize("u", [-0.9, 0.0, 0.93, 5.0])
    @pytest.mark.parametrize("eta", [0.1, 1.0, 7.0])
    def test_gram_matrix_positive_definite(self, u, eta):
        gram = overlap_matrix(50, SturmianParams(eta=eta, u=u))
        np.testing.assert_array_equal(gram, gram.T)
        np.linalg.cholesky(gram)

    @pytest.mark.parametrize("eta, u", [(1.0, 0.0), (2.0, 0.93), (0.7, -0.4)])
    def test_biorthogonality(self, eta, u):
        params = SturmianParams(eta=eta, u=u)
        deviation = max(
            abs(overlap_numeric(n, m, params).value - (1.0 if n == m else 0.0))
            for n in range(11) for m in range(11)
        )
        assert deviation < 1e-9

    @pytest.mark.parametrize("n, m", [(2, 3), (3, 3), (0, 1), (0, 4)])
    def test_unit_weight_reproduces_overlap(self, n, m):
        params = SturmianParams(eta=1.3, u=0.9)
        estimate = overlap_numeric(n, m, params, weight="unit")
        assert estimate.value == pytest.approx(overlap_element(n, m, params), abs=1e-10)

    @pytest.mark.parametrize("n, m", [(0, 0), (1, 3), (3, 3), (2, 4)])
    def test_mapped_legendre_grid(self, n, m):
        params = SturmianParams(eta=1.0, u=0.0)
        grid = RadialGrid.gauss_legendre(RadialGrid.adaptive_r_max(n, m, params), size=200)
        estimate = overlap_numeric(n, m, params, grid)
        assert estimate.value == pytest.approx(1.0 if n == m else 0.0, abs=1e-10)

    def test_coarse_grid_raises(self):
        params = SturmianParams(eta=1.0, u=0.0)
        with pytest.raises(QuadratureError) as excinfo:
            overlap_numeric(5, 5, params, RadialGrid.gauss_legendre(30.0, size=8))
        assert excinfo.value.residual > 1e-10

    def test_rejects_unknown_weight(self):
        with pytest.raises(DomainError):
            overlap_numeric(0, 0, SturmianParams(eta=1.0, u=0.0), weight="r")


class TestRadialGrid:
    def test_laguerre_grid_is_valid(self):
        grid = RadialGrid.gauss_laguerre(SturmianParams(eta=2.0, u=0.5), size=40)
        assert len(grid) == 40
        assert np.all(np.diff(grid.nodes) > 0)
        assert np.all(grid.weights > 0)
        assert grid.companion is not None

    def test_uniform_grid(self):
        grid = RadialGrid.uniform(0.125, 30.0, 2.0 ** -10)
        assert grid.spacing == 2.0 ** -10
        assert grid.nodes[-1] == pytest.approx(30.0)
        assert grid.integrate(np.ones(len(grid))) == pytest.approx(30.0 - 0.125)

    def test_spacing_rejects_nonuniform(self):
        grid = RadialGrid.gauss_legendre(10.0, size=20)
        with pytest.raises(DomainError):
            grid.spacing

    @pytest.mark.parametrize("nodes, weights", [
        ([1.0, 0.5, 2.0], [1.0, 1.0, 1.0]),
        ([0.0, 1.0, 2.0], [1.0, 1.0, 1.0]),
        ([0.5, 1.0, 2.0], [1.0, 0.0, 1.0]),
        ([0.5, 1.0], [1.0]),
    ])
    def test_invalid_grids(self, nodes, weights):
        with pytest.raises(DomainError):
            RadialGrid(np.array(nodes), np.array(weights))


class TestOdeResidual:
    # binary step sizes keep the node positions exact
    H = 2.0 ** -10

    def test_ground_function(self):
        params = SturmianParams(eta=1.0, u=0.0)
        residual = sturmian_ode_residual(0, params, RadialGrid.uniform(0.125, 30.0, self.H))
        assert residual < 1e-5

    @pytest.mark.parametrize("n, eta, u", [(0, 1.0, 0.0), (4, 2.0, 0.93), (2, 0.5, 1.7)])
    def test_second_order_convergence(self, n, eta, u):
        params = SturmianParams(eta=eta, u=u)
        coarse = sturmian_ode_residual(n, params, RadialGrid.uniform(0.125, 30.0, 2 * self.H))
        fine = sturmian_ode_residual(n, params, RadialGrid.uniform(0.125, 30.0, self.H))
        assert 3.5 < coarse / fine < 4.5

    def test_excited_function_bound(self):
        params = SturmianParams(eta=2.0, u=0.93)
        assert sturmian_ode_residual(4, params, RadialGrid.uniform(0.125, 30.0, self.H)) < 2e-3
