"""Two-qubit dephasing (T2) spectroscopy simulator.

Computes the observables of a pair of probe qubits coupled to a shared
fluctuating environment: local and correlated accumulated noise, the
integrated response, and the frequency filter functions of the Ramsey and
spin-echo pulse protocols, for Markovian, harmonic (gapped, gapless and
driven), diffusive and dipole-coupled (NV-style) environments.
"""

from .model import (
    CattaneoParams,
    DrivenGaussianOccupation,
    GaplessDispersion,
    GappedDispersion,
    MomentumGrid,
    NvParams,
    ParametricDriveOccupation,
    ProbeGeometry,
    ProtocolKind,
    SpaceTimeMap,
    TabulatedDispersion,
    ThermalOccupation,
    from_dict,
    to_dict,
    validate,
    validation_errors,
)

__version__ = "0.1.0"

__all__ = [
    "CattaneoParams",
    "DrivenGaussianOccupation",
    "GaplessDispersion",
    "GappedDispersion",
    "MomentumGrid",
    "NvParams",
    "ParametricDriveOccupation",
    "ProbeGeometry",
    "ProtocolKind",
    "SpaceTimeMap",
    "TabulatedDispersion",
    "ThermalOccupation",
    "from_dict",
    "to_dict",
    "validate",
    "validation_errors",
    "__version__",
]
