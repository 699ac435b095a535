"""Forward-transform quadrature against closed forms.

The quadrature grid is the arbiter for the count-probability transform's
denominator exponent: the n+1 variant must match to 1e-7 while the
n variant misses by a wide margin.
"""

import math

import numpy as np
import pytest

from clusterline import (
    IntervalModel,
    ModelParams,
    QuadratureError,
    QuadratureSpec,
    count_transform_residuals,
    laplace_moment_closed,
    laplace_pmf_closed,
    mean_complete,
    moment_complete,
    numeric_laplace,
    spec_for_count_transform,
)

E = math.e


class TestNumericLaplace:
    def test_exponential(self):
        spec = QuadratureSpec(abs_tol=1e-10, upper_cut=80.0)
        value = numeric_laplace(lambda x: np.exp(-x), 1.0, spec)
        assert value == pytest.approx(0.5, abs=1e-10)

    def test_constant(self):
        spec = QuadratureSpec(abs_tol=1e-10, upper_cut=60.0)
        assert numeric_laplace(lambda x: np.ones_like(np.asarray(x, dtype=float)), 2.0, spec) == pytest.approx(
            0.5, abs=1e-10
        )

    def test_linearity(self):
        spec = QuadratureSpec(abs_tol=1e-11, upper_cut=70.0)
        f = lambda x: np.exp(-0.5 * x)
        g = lambda x: np.exp(-x) * np.cos(x)
        combo = lambda x: 2.0 * f(x) + 3.0 * g(x)
        lhs = numeric_laplace(combo, 1.3, spec)
        rhs = 2.0 * numeric_laplace(f, 1.3, spec) + 3.0 * numeric_laplace(g, 1.3, spec)
        assert lhs == pytest.approx(rhs, abs=2e-11)

    def test_requires_positive_argument(self):
        spec = QuadratureSpec()
        with pytest.raises(ValueError):
            numeric_laplace(lambda x: np.ones_like(x), 0.0, spec)

    def test_tail_budget_error(self):
        # constant function with a cut so small the tail bound eats the budget
        spec = QuadratureSpec(abs_tol=1e-10, upper_cut=1.0)
        with pytest.raises(QuadratureError):
            numeric_laplace(lambda x: np.ones_like(np.asarray(x, dtype=float)), 0.5, spec)

    def test_bad_spec_rejected(self):
        with pytest.raises(ValueError):
            QuadratureSpec(abs_tol=0.0)
        with pytest.raises(ValueError):
            QuadratureSpec(upper_cut=-1.0)


class TestCountProbTransform:
    def test_reference_value(self):
        value = laplace_pmf_closed(ModelParams(1.0, 1.0), 0, 1.0)
        assert value == pytest.approx(E**2 / (E**2 + 1.0), abs=1e-12)

    def test_large_argument_initial_value(self):
        # zero-count profile starts at 1, so the transform decays like 1/s
        s = 1e3
        value = laplace_pmf_closed(ModelParams(1.0, 1.0), 0, s)
        assert value == pytest.approx(1.0 / s, rel=1e-2)

    def test_total_mass_identity(self):
        # summing over all counts transforms the constant 1
        s = 1.0
        total = math.fsum(laplace_pmf_closed(ModelParams(1.0, 1.0), n, s) for n in range(41))
        assert total == pytest.approx(1.0 / s, abs=1e-9)

    @pytest.mark.parametrize("lam,eps", [(1.0, 1.0), (2.0, 0.5)])
    def test_quadrature_grid_confirms_exponent(self, lam, eps):
        params = ModelParams(lam, eps)
        rows = count_transform_residuals(params, range(4), (0.5, 1.0, 2.0))
        assert max(row["abs_err"] for row in rows) < 1e-7
        # the competing exponent (one lower) misses by orders of magnitude
        # more than the 1e-7 agreement of the right one
        for row in rows:
            n, s = row["n"], row["s"]
            w = (lam + s) * eps
            competing = lam**n * math.exp(w) / (s * math.exp(w) + lam) ** n
            assert abs(row["numeric"] - competing) > 1e-5

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            laplace_pmf_closed(ModelParams(1.0, 1.0), -1, 1.0)
        with pytest.raises(ValueError):
            laplace_pmf_closed(ModelParams(1.0, 1.0), 0, 0.0)

    def test_scaled_pair_form(self):
        # with a = e^{lam eps}/lam, the transform also reads
        # a e^{eps s} / (a s e^{eps s} + 1)^{n+1}
        for lam, eps in ((1.0, 1.0), (2.0, 0.5), (0.7, 1.3)):
            a = math.exp(eps * lam) / lam
            for n in range(4):
                for s in (0.5, 1.0, 2.0):
                    pair = a * math.exp(eps * s) / (a * s * math.exp(eps * s) + 1.0) ** (n + 1)
                    assert laplace_pmf_closed(ModelParams(lam, eps), n, s) == pytest.approx(
                        pair, rel=1e-12
                    )


def curve_transform(params, s, curve, upper_cut):
    spec = QuadratureSpec(abs_tol=1e-10, upper_cut=upper_cut)
    eps = params.radius
    cuts = [k * eps for k in range(1, int(upper_cut / eps) + 1)]
    return numeric_laplace(curve, s, spec, breakpoints=cuts)


class TestMomentTransform:
    def test_mean_curve(self):
        params = ModelParams(1.0, 1.0)

        def mean_curve(xs):
            return np.array(
                [mean_complete(IntervalModel(params, x)) if x > 0 else 0.0 for x in np.atleast_1d(xs)]
            )

        numeric = curve_transform(params, 1.0, mean_curve, 60.0)
        assert laplace_moment_closed(params, 1, 1.0) == pytest.approx(numeric, abs=1e-7)
        # independent closed evaluation of the same transform
        assert laplace_moment_closed(params, 1, 1.0) == pytest.approx(math.exp(-2.0), abs=1e-10)

    def test_second_moment_curve(self):
        params = ModelParams(2.0, 0.5)

        def m2_curve(xs):
            return np.array(
                [moment_complete(IntervalModel(params, x), 2) if x > 0 else 0.0 for x in np.atleast_1d(xs)]
            )

        numeric = curve_transform(params, 0.7, m2_curve, 70.0)
        assert laplace_moment_closed(params, 2, 0.7) == pytest.approx(numeric, abs=1e-7)

    def test_large_argument_decays(self):
        assert abs(laplace_moment_closed(ModelParams(1.0, 1.0), 1, 1e3)) < 1e-6

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            laplace_moment_closed(ModelParams(1.0, 1.0), 0, 1.0)
        with pytest.raises(ValueError):
            laplace_moment_closed(ModelParams(1.0, 1.0), 1, -1.0)


class TestSpecForCountTransform:
    def test_cut_covers_support_and_decay(self):
        params = ModelParams(1.0, 1.0)
        spec = spec_for_count_transform(params, 3, 0.5)
        assert spec.upper_cut >= 4.0 + 40.0 / 0.5
