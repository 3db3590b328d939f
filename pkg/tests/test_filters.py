import math

import numpy as np
import pytest

from t2pair.errors import DomainError
from t2pair.filters import eval_filter, filter_combination, low_frequency_exponent
from t2pair.model import ProtocolKind
from t2pair.numerics import integrate_adaptive

RAM = ProtocolKind.RAMSEY
LSE = ProtocolKind.LOCAL_SPIN_ECHO
GSE = ProtocolKind.GLOBAL_SPIN_ECHO


class TestClosedForms:
    def test_ramsey_zero_frequency_limit(self):
        assert eval_filter(RAM, 0.0, 2.0) == pytest.approx(4.0, abs=1e-14)

    def test_ramsey_node(self):
        assert abs(eval_filter(RAM, 2.0 * math.pi, 1.0)) < 1e-30

    def test_gse_value(self):
        assert eval_filter(GSE, 2.0 * math.pi, 1.0).real == pytest.approx(
            16.0 / (4.0 * math.pi**2), rel=1e-14
        )

    def test_lse_node_purely_imaginary_zero(self):
        val = eval_filter(LSE, 2.0 * math.pi, 1.0)
        assert val.real == 0.0
        assert abs(val.imag) < 1e-15

    def test_echo_filters_vanish_at_zero_frequency(self):
        assert eval_filter(LSE, 0.0, 3.0) == 0.0
        assert eval_filter(GSE, 0.0, 3.0) == 0.0

    def test_duration_guard(self):
        with pytest.raises(DomainError):
            eval_filter(RAM, 1.0, 0.0)

    def test_value_structure(self):
        # Ramsey and GSE real >= 0, LSE purely imaginary
        omegas = np.linspace(-20.0, 20.0, 301)
        for t in (0.3, 2.0, 7.0):
            ram = eval_filter(RAM, omegas, t)
            gse = eval_filter(GSE, omegas, t)
            lse = eval_filter(LSE, omegas, t)
            assert np.all(ram.imag == 0.0) and np.all(ram.real >= 0.0)
            assert np.all(gse.imag == 0.0) and np.all(gse.real >= 0.0)
            assert np.all(lse.real == 0.0)


class TestDefinitionQuadrature:
    @pytest.mark.parametrize("omega,t", [(2.3, 1.7), (0.31, 4.0), (9.0, 0.9)])
    def test_window_integrals(self, omega, t):
        # halves split exactly at the pulse time
        a = integrate_adaptive(lambda x: np.exp(-1j * omega * x), 0.0, t / 2,
                               tol=1e-14, freq_hint=omega)
        b = integrate_adaptive(lambda x: np.exp(-1j * omega * x), t / 2, t,
                               tol=1e-14, freq_hint=omega)
        assert abs(a.value + b.value) ** 2 == pytest.approx(
            eval_filter(RAM, omega, t).real, abs=1e-10
        )
        assert abs(a.value - b.value) ** 2 == pytest.approx(
            eval_filter(GSE, omega, t).real, abs=1e-10
        )
        lse = (a.value - b.value) * np.conj(a.value + b.value)
        assert lse == pytest.approx(eval_filter(LSE, omega, t), abs=1e-10)


class TestCombination:
    def test_zero_frequency_limit_is_t_squared(self):
        # series expansion of (4/w^2)(2 e^{iwt/2} - e^{iwt} - 1) gives t^2
        assert filter_combination(0.0, 3.0) == pytest.approx(9.0, abs=1e-13)

    def test_direct_substitution(self):
        assert filter_combination(2.0 * math.pi, 1.0) == pytest.approx(
            -4.0 / math.pi**2, abs=1e-14
        )

    def test_matches_exponential_form(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            w = rng.uniform(-40.0, 40.0)
            t = rng.uniform(0.05, 9.0)
            direct = 4.0 / w**2 * (2 * np.exp(0.5j * w * t) - np.exp(1j * w * t) - 1.0)
            assert filter_combination(w, t) == pytest.approx(direct, rel=1e-12)

    def test_matches_sum_of_filters(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            w = rng.uniform(-40.0, 40.0)
            t = rng.uniform(0.05, 9.0)
            s = (eval_filter(RAM, w, t) - eval_filter(GSE, w, t)
                 + 2.0 * eval_filter(LSE, w, t))
            assert abs(s - filter_combination(w, t)) <= 1e-12 * abs(filter_combination(w, t))


class TestLowFrequency:
    def test_exponent_table(self):
        assert low_frequency_exponent(RAM) == 0
        assert low_frequency_exponent(LSE) == 1
        assert low_frequency_exponent(GSE) == 2

    def test_fitted_exponents(self):
        t = 2.0
        omegas = np.geomspace(1e-4 / t, 1e-2 / t, 20)
        for kind in ProtocolKind:
            mags = np.abs(eval_filter(kind, omegas, t))
            slope = np.polyfit(np.log(omegas), np.log(mags), 1)[0]
            assert slope == pytest.approx(low_frequency_exponent(kind), abs=0.05)


class TestScaling:
    def test_omega_sq_times_filter_depends_on_ut_only(self):
        for kind in ProtocolKind:
            for w, t in [(1.1, 2.0), (4.0, 0.7), (0.02, 5.0)]:
                a = complex(eval_filter(kind, w, t)) * w**2
                b = complex(eval_filter(kind, w / 2.0, 2.0 * t)) * (w / 2.0) ** 2
                assert a == pytest.approx(b, rel=1e-12, abs=1e-300)
