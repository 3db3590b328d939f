import math

import numpy as np
import pytest

from t2pair import numerics as nm
from t2pair.errors import DomainError
from t2pair.harmonic import mode_response

# golden values from a 30-digit reference evaluation
J0_GOLDEN = [
    (0.5, 0.9384698072408129),
    (1.0, 0.76519768655796655),
    (2.0, 0.22389077914123567),
    (5.0, -0.1775967713143383),
    (7.9, 0.19436184484127824),
    (8.1, 0.14751745404437767),
    (12.0, 0.047689310796833537),
    (30.0, -0.086367983581040211),
    (100.0, 0.019985850304223122),
    (350.0, -0.037479568421573194),
    (700.0, -0.0062882724650687668),
]
K0_GOLDEN = [
    (0.01, 4.7212447301610949),
    (0.1, 2.4270690247020166),
    (0.5, 0.92441907122766586),
    (1.0, 0.42102443824070833),
    (1.9, 0.12884597927604749),
    (2.1, 0.10078374088996693),
    (5.0, 0.0036910983340425943),
    (20.0, 5.7412378153365243e-10),
    (100.0, 4.656628229175902e-45),
    (700.0, 4.6697764316853769e-306),
]


class TestBessel:
    @pytest.mark.parametrize("x,want", J0_GOLDEN)
    def test_j0_golden(self, x, want):
        assert nm.bessel_j0(x) == pytest.approx(want, abs=1e-12)

    @pytest.mark.parametrize("x,want", K0_GOLDEN)
    def test_k0_golden(self, x, want):
        assert nm.bessel_k0(x) == pytest.approx(want, rel=1e-12, abs=1e-310)

    def test_j0_at_zero(self):
        assert nm.bessel_j0(0.0) == 1.0

    def test_j0_first_zero_against_series_oracle(self):
        # independent oracle: the power series, bisected
        def j0_series(x):
            total, term, q = 1.0, 1.0, x * x / 4.0
            for k in range(1, 40):
                term = -term * q / (k * k)
                total += term
            return total

        def bisect(fn, lo=2.0, hi=3.0):
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if fn(lo) * fn(mid) <= 0:
                    hi = mid
                else:
                    lo = mid
            return 0.5 * (lo + hi)

        z_oracle = bisect(j0_series)
        z_impl = bisect(lambda x: nm.bessel_j0(x))
        assert abs(z_impl - z_oracle) < 1e-9
        assert z_oracle == pytest.approx(2.404825557695773, abs=1e-10)

    def test_k0_asymptotic_constant(self):
        x = 50.0
        assert nm.bessel_k0(x) * math.sqrt(x) * math.exp(x) == pytest.approx(
            math.sqrt(math.pi / 2), rel=0.01
        )

    def test_k0_domain(self):
        with pytest.raises(DomainError):
            nm.bessel_k0(0.0)
        with pytest.raises(DomainError):
            nm.bessel_k0(np.array([1.0, -2.0]))

    def test_vectorized_shapes(self):
        x = np.linspace(0.0, 20.0, 57)
        assert nm.bessel_j0(x).shape == x.shape
        assert nm.bessel_k0(x[1:]).shape == (56,)


class TestAdaptiveQuadrature:
    def test_polynomial(self):
        res = nm.integrate_adaptive(lambda x: x**2, 0.0, 1.0, tol=1e-13)
        assert res.converged
        assert res.value == pytest.approx(1.0 / 3.0, abs=1e-12)

    def test_full_sine_period(self):
        res = nm.integrate_adaptive(np.sin, 0.0, 2.0 * math.pi, tol=1e-12)
        assert res.converged
        assert abs(res.value) < 1e-10

    def test_hankel_pair(self):
        res = nm.integrate_adaptive(
            lambda x: np.exp(-x) * nm.bessel_j0(x), 0.0, 40.0,
            tol=1e-12, freq_hint=1.0,
        )
        assert res.converged
        assert res.value == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-8)

    def test_complex_integrand(self):
        res = nm.integrate_adaptive(lambda x: np.exp(1j * x), 0.0, 1.0, tol=1e-13)
        assert res.value == pytest.approx((np.exp(1j) - 1.0) / 1j, abs=1e-12)

    def test_deterministic(self):
        runs = [
            nm.integrate_adaptive(lambda x: np.sin(7.0 * x) / (1.0 + x * x),
                                  0.0, 10.0, tol=1e-11, freq_hint=7.0)
            for _ in range(2)
        ]
        assert runs[0].value == runs[1].value
        assert runs[0].evaluations == runs[1].evaluations

    def test_converged_flag_honest(self):
        res = nm.integrate_adaptive(
            lambda x: np.sin(300.0 * x), 0.0, 50.0, tol=1e-14, rel_tol=1e-14,
            max_panels=8,
        )
        assert not res.converged

    def test_bad_bounds(self):
        with pytest.raises(DomainError):
            nm.integrate_adaptive(np.cos, 1.0, 1.0)


class TestAngularKernel:
    def test_limits(self):
        assert nm.angular_kernel(3, 0.0) == pytest.approx(4 * math.pi, abs=1e-12)
        assert nm.angular_kernel(2, 0.0) == pytest.approx(2 * math.pi, abs=1e-12)
        assert nm.angular_kernel(1, math.pi) == pytest.approx(-2.0, abs=1e-12)

    def test_dimension_guard(self):
        with pytest.raises(DomainError):
            nm.angular_kernel(4, 1.0)


class TestDoubleTimeIntegral:
    def test_constant_kernel_area(self):
        val = nm.double_time_integral(lambda t2, t1: np.ones_like(t2 * t1), 2.0)
        assert val == pytest.approx(4.0, abs=1e-13)

    def test_sign_function_cancels_constant(self):
        for flags in ({"fp_on_t1": True}, {"fp_on_t2": True}):
            val = nm.double_time_integral(
                lambda t2, t1: np.ones_like(t2 * t1), 3.0, **flags)
            assert abs(val) < 1e-13

    def test_mode_response_single_mode(self):
        val = 0.5 * nm.double_time_integral(
            lambda t2, t1: mode_response(1.0, t2 - t1), 2.0 * math.pi,
            n_steps=2048,
        )
        assert val == pytest.approx(-math.pi, abs=1e-6)

    def test_fourth_order_on_smooth_kernel(self):
        t = 5.0
        exact = (math.sin(0.7 * t) / 0.7) * (
            (-math.cos(0.3 * t + 1.0) + math.cos(1.0)) / 0.3
        )

        def kernel(t2, t1):
            return np.cos(0.7 * t2) * np.sin(0.3 * t1 + 1.0)

        errs = [abs(nm.double_time_integral(kernel, t, n_steps=n) - exact)
                for n in (64, 128, 256)]
        assert errs[0] / errs[1] > 8.0
        assert errs[1] / errs[2] > 8.0

    def test_zero_duration(self):
        assert nm.double_time_integral(lambda a, b: a + b, 0.0) == 0.0

    def test_minimum_steps_guard(self):
        with pytest.raises(DomainError):
            nm.double_time_integral(lambda a, b: a + b, 1.0, n_steps=16)
