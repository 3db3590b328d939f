import math

import numpy as np
import pytest

from t2pair.errors import InvalidKernel, NonPositiveParameter
from t2pair.markovian import MarkovSpec, markov_signal


def test_perfectly_correlated_noise_cancels():
    assert markov_signal(MarkovSpec(1.0, 1.0), 5.0).coherence == 1.0


def test_uncorrelated_closed_form():
    assert markov_signal(MarkovSpec(1.0, 0.0), 2.0).coherence == pytest.approx(
        math.exp(-2.0), abs=1e-15
    )


def test_half_correlated_closed_form():
    sig = markov_signal(MarkovSpec(1.0, 0.5), 1.0)
    assert sig.coherence == pytest.approx(math.exp(-0.5), abs=1e-15)
    assert sig.n1 == sig.n2 == pytest.approx(0.5, abs=1e-15)
    assert sig.n12 == pytest.approx(0.5, abs=1e-15)


def test_kernel_positivity_guard():
    with pytest.raises(InvalidKernel):
        MarkovSpec(0.5, 0.8)
    with pytest.raises(InvalidKernel):
        MarkovSpec(0.5, -0.8)


def test_negative_time_guard():
    with pytest.raises(NonPositiveParameter):
        markov_signal(MarkovSpec(1.0, 0.0), -1.0)


def test_profile_sampling():
    spec = MarkovSpec.at_separation(lambda r: math.exp(-r), 2.0)
    assert spec.gamma0 == 1.0
    assert spec.gamma_r == pytest.approx(math.exp(-2.0))


def test_monotone_and_unit_at_zero():
    spec = MarkovSpec(1.3, 0.2)
    ts = np.linspace(0.0, 10.0, 64)
    coh = [markov_signal(spec, t).coherence for t in ts]
    assert coh[0] == 1.0
    assert all(a >= b for a, b in zip(coh, coh[1:]))


def test_log_coherence_exactly_linear():
    spec = MarkovSpec(1.0, 0.25)
    ts = np.linspace(0.0, 6.0, 25)
    logc = np.array([math.log(markov_signal(spec, t).coherence) for t in ts])
    slope, intercept = np.polyfit(ts, logc, 1)
    assert slope == pytest.approx(-(spec.gamma0 - spec.gamma_r), abs=1e-12)
    assert intercept == pytest.approx(0.0, abs=1e-12)
