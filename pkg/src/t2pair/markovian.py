"""Closed-form signals for classical Markovian (white) noise.

For delta-correlated classical fields with spatial noise power gamma(r),
the probe couplings are taken as lambda_1 = lambda_2 = 1 and

    N_i(t)  = gamma(0) t / 2
    N_12(t) = gamma(r) t
    <s1- s2+> = exp(-(gamma(0) - gamma(r)) t)

The response contribution vanishes identically (classical fields commute).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import InvalidKernel, NonPositiveParameter

__all__ = ["MarkovSpec", "MarkovSignal", "markov_signal"]


@dataclass(frozen=True)
class MarkovSpec:
    """Noise power at zero separation and at the probe separation.

    ``profile`` optionally maps separation to noise power; it is sampled
    once at construction via :meth:`at_separation`.
    """

    gamma0: float
    gamma_r: float

    def __post_init__(self):
        if self.gamma0 < 0:
            raise NonPositiveParameter(f"markov.gamma0: must be >= 0, got {self.gamma0}")
        if self.gamma0 < abs(self.gamma_r):
            raise InvalidKernel(
                f"markov: |gamma(r)| = {abs(self.gamma_r)} exceeds gamma(0) = {self.gamma0}; "
                "the two-point noise kernel would not be positive semi-definite"
            )

    @classmethod
    def at_separation(cls, profile: Callable[[float], float], r: float) -> "MarkovSpec":
        return cls(gamma0=float(profile(0.0)), gamma_r=float(profile(r)))


@dataclass(frozen=True)
class MarkovSignal:
    n1: float
    n2: float
    n12: float
    coherence: float


def markov_signal(spec: MarkovSpec, t: float) -> MarkovSignal:
    """Local noises, correlated noise and two-qubit coherence at time t."""
    if t < 0:
        raise NonPositiveParameter(f"markov: t must be >= 0, got {t}")
    n_local = 0.5 * spec.gamma0 * t
    n12 = spec.gamma_r * t
    return MarkovSignal(
        n1=n_local,
        n2=n_local,
        n12=n12,
        coherence=math.exp(-(spec.gamma0 - spec.gamma_r) * t),
    )
