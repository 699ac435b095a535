"""Adaptive quadrature against closed forms and an independent scipy
oracle."""

import math

import numpy as np
import pytest
from scipy import integrate as sci

from clusterline import QuadratureError
from clusterline.quadrature import PanelCdf, integrate, integrate_adaptive


class TestIntegrateAdaptive:
    def test_exponential_closed_form(self):
        value = integrate(lambda x: np.exp(-2.0 * x), 0.0, 40.0, abs_tol=1e-12)
        assert value == pytest.approx(0.5, abs=1e-12)

    def test_polynomial_exact(self):
        value = integrate(lambda x: 3.0 * x**2, 0.0, 2.0)
        assert value == pytest.approx(8.0, abs=1e-12)

    def test_empty_interval(self):
        assert integrate(lambda x: x, 1.0, 1.0) == 0.0

    def test_kinked_integrand_with_breakpoints(self):
        f = lambda x: np.where(x < 1.0, x, 2.0 - x)  # tent, kink at 1
        value = integrate(f, 0.0, 2.0, abs_tol=1e-12, breakpoints=[1.0])
        assert value == pytest.approx(1.0, abs=1e-12)

    def test_matches_scipy_oracle(self):
        f = lambda x: np.exp(-x) * np.cos(3.0 * x) + 0.2 * x
        mine = integrate(f, 0.0, 6.0, abs_tol=1e-11)
        ref, _ = sci.quad(lambda x: math.exp(-x) * math.cos(3.0 * x) + 0.2 * x, 0.0, 6.0, epsabs=1e-13)
        assert mine == pytest.approx(ref, abs=1e-10)

    def test_budget_exhaustion(self):
        wild = lambda x: np.sin(1.0 / np.maximum(x, 1e-12))
        with pytest.raises(QuadratureError):
            integrate(wild, 0.0, 1.0, abs_tol=1e-14, max_refinements=5)

    def test_error_estimate_reported(self):
        _, err, sup = integrate_adaptive(lambda x: np.exp(-x), 0.0, 10.0, abs_tol=1e-10)
        assert 0.0 <= err <= 1e-10
        # nodes are interior, so the supremum probe sits just below f(0)
        assert 0.9 <= sup <= 1.0


class TestPanelCdf:
    def test_uniform_density(self):
        cdf = PanelCdf(lambda x: np.ones_like(x), 0.0, 2.0)
        assert cdf.total == pytest.approx(2.0, abs=1e-13)
        assert cdf(1.0) == pytest.approx(1.0, abs=1e-13)
        assert cdf(-5.0) == 0.0
        assert cdf(9.0) == pytest.approx(2.0, abs=1e-13)

    def test_matches_scipy_on_smooth_density(self):
        dens = lambda x: np.exp(-x) * (1.0 + np.sin(x) ** 2)
        cdf = PanelCdf(dens, 0.0, 8.0, panels_per_segment=32)
        for t in (0.3, 1.7, 4.4, 7.9):
            ref, _ = sci.quad(lambda u: math.exp(-u) * (1.0 + math.sin(u) ** 2), 0.0, t, epsabs=1e-13)
            assert cdf(t) == pytest.approx(ref, abs=1e-11)

    def test_vectorized_queries_sorted(self):
        cdf = PanelCdf(lambda x: np.exp(-x), 0.0, 10.0)
        xs = np.linspace(-1.0, 11.0, 57)
        vals = cdf(xs)
        assert np.all(np.diff(vals) >= -1e-14)

    def test_rejects_empty_support(self):
        with pytest.raises(ValueError):
            PanelCdf(lambda x: x, 2.0, 2.0)
