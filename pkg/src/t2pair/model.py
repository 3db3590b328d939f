"""Domain types, validation and serialization.

Unit conventions: hbar = k_B = 1 throughout.  All energies, rates,
temperatures and inverse times share one unit; lengths share one unit; the
mode velocity links the two.  Every type here is an immutable dataclass,
safe to share across workers, and round-trips bit-exactly through
``to_dict``/``from_dict`` (floats survive JSON because the writer uses
shortest round-trip decimals).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DimensionOutOfRange,
    DivergentRegime,
    DomainError,
    NonPositiveParameter,
)

__all__ = [
    "ProtocolKind",
    "GappedDispersion",
    "GaplessDispersion",
    "TabulatedDispersion",
    "ThermalOccupation",
    "DrivenGaussianOccupation",
    "ParametricDriveOccupation",
    "MomentumGrid",
    "CattaneoParams",
    "NvParams",
    "ProbeGeometry",
    "SpaceTimeMap",
    "validate",
    "validation_errors",
    "to_dict",
    "from_dict",
]


class ProtocolKind(enum.Enum):
    """Pulse sequence selector.

    The echo sign function sgn(t/2 - tau) multiplies neither time argument
    of the environment correlator (Ramsey), only the second one (local
    spin echo), or both (global spin echo).
    """

    RAMSEY = "ramsey"
    LOCAL_SPIN_ECHO = "local-spin-echo"
    GLOBAL_SPIN_ECHO = "global-spin-echo"

    @property
    def fp_flags(self) -> tuple[bool, bool]:
        """(sign on t1 axis, sign on t2 axis) for the double time integral."""
        if self is ProtocolKind.RAMSEY:
            return (False, False)
        if self is ProtocolKind.LOCAL_SPIN_ECHO:
            return (False, True)
        return (True, True)

    @staticmethod
    def sign_function(tau, t: float):
        """+1 before the echo pulse at t/2, -1 after it."""
        return np.where(np.asarray(tau) < 0.5 * t, 1.0, -1.0)

    @classmethod
    def parse(cls, text: str) -> "ProtocolKind":
        aliases = {
            "ramsey": cls.RAMSEY,
            "lse": cls.LOCAL_SPIN_ECHO,
            "local-spin-echo": cls.LOCAL_SPIN_ECHO,
            "gse": cls.GLOBAL_SPIN_ECHO,
            "global-spin-echo": cls.GLOBAL_SPIN_ECHO,
        }
        key = text.strip().lower()
        if key not in aliases:
            raise DomainError(f"unknown protocol {text!r}")
        return aliases[key]


# ---------------------------------------------------------------------------
# dispersions


@dataclass(frozen=True)
class GappedDispersion:
    """omega(k) = sqrt(omega0^2 + c^2 k^2)."""

    omega0: float
    c: float

    def omega(self, k):
        k = np.asarray(k, dtype=float)
        return np.sqrt(self.omega0 ** 2 + (self.c * k) ** 2)

    def max_group_velocity(self, k_max: float) -> float:
        return self.c


@dataclass(frozen=True)
class GaplessDispersion:
    """omega(k) = alpha * |k|^z with dynamical exponent z >= 1."""

    alpha: float
    z: float

    def omega(self, k):
        k = np.asarray(k, dtype=float)
        return self.alpha * np.abs(k) ** self.z

    def max_group_velocity(self, k_max: float) -> float:
        if self.z >= 1.0:
            return self.alpha * self.z * k_max ** (self.z - 1.0)
        return self.alpha * self.z * 1e-12 ** (self.z - 1.0)


def _pchip_slopes(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    # Fritsch-Carlson monotone slopes
    h = np.diff(x)
    delta = np.diff(y) / h
    m = np.zeros_like(y)
    for i in range(1, len(x) - 1):
        if delta[i - 1] * delta[i] <= 0:
            m[i] = 0.0
        else:
            w1 = 2 * h[i] + h[i - 1]
            w2 = h[i] + 2 * h[i - 1]
            m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i])
    m[0] = ((2 * h[0] + h[1]) * delta[0] - h[0] * delta[1]) / (h[0] + h[1])
    if m[0] * delta[0] <= 0:
        m[0] = 0.0
    elif abs(m[0]) > 3 * abs(delta[0]):
        m[0] = 3 * delta[0]
    m[-1] = ((2 * h[-1] + h[-2]) * delta[-1] - h[-1] * delta[-2]) / (h[-1] + h[-2])
    if m[-1] * delta[-1] <= 0:
        m[-1] = 0.0
    elif abs(m[-1]) > 3 * abs(delta[-1]):
        m[-1] = 3 * delta[-1]
    return m


@dataclass(frozen=True)
class TabulatedDispersion:
    """Sampled omega(|k|), interpolated by a monotone piecewise cubic.

    Extrapolation outside the sampled |k| range is a DomainError rather
    than a silent guess; negative interpolated omega cannot occur because
    the interpolant preserves monotone data.
    """

    k_samples: tuple[float, ...]
    omega_samples: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "k_samples", tuple(float(v) for v in self.k_samples))
        object.__setattr__(
            self, "omega_samples", tuple(float(v) for v in self.omega_samples)
        )

    def omega(self, k):
        x = np.asarray(self.k_samples)
        y = np.asarray(self.omega_samples)
        k = np.abs(np.asarray(k, dtype=float))
        if np.any(k < x[0] - 1e-15) or np.any(k > x[-1] + 1e-15):
            raise DomainError(
                f"tabulated dispersion queried outside [{x[0]}, {x[-1]}]"
            )
        k = np.clip(k, x[0], x[-1])
        m = _pchip_slopes(x, y)
        idx = np.clip(np.searchsorted(x, k, side="right") - 1, 0, len(x) - 2)
        h = x[idx + 1] - x[idx]
        s = (k - x[idx]) / h
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        out = h00 * y[idx] + h10 * h * m[idx] + h01 * y[idx + 1] + h11 * h * m[idx + 1]
        return out if out.ndim else float(out)

    def max_group_velocity(self, k_max: float) -> float:
        x = np.asarray(self.k_samples)
        y = np.asarray(self.omega_samples)
        return float(np.max(np.abs(np.diff(y) / np.diff(x))))


# ---------------------------------------------------------------------------
# occupations


@dataclass(frozen=True)
class ThermalOccupation:
    """Bose occupation at temperature T (T = 0 gives the vacuum)."""

    T: float


@dataclass(frozen=True)
class DrivenGaussianOccupation:
    """Thermal occupation plus a Gaussian bump of driven modes.

    n(k) = n_th(omega_k) + amplitude * exp(-((|k| - k_dr)/sigma_dr)^2)
    """

    T: float
    amplitude: float
    k_dr: float
    sigma_dr: float


@dataclass(frozen=True)
class ParametricDriveOccupation:
    """Occupation after a pair-creation drive of strength delta at frequency
    Omega applied for t_drive on top of a thermal state."""

    T: float
    delta: float
    Omega: float
    t_drive: float


# ---------------------------------------------------------------------------
# grids and bath parameter sets


@dataclass(frozen=True)
class MomentumGrid:
    """Radial momentum grid for continuum mode integrals."""

    k_min: float
    k_max: float
    n_points: int = 2048
    spacing: str = "linear"

    def points(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.k_min, self.k_max, self.n_points)
        return np.linspace(self.k_min, self.k_max, self.n_points)


@dataclass(frozen=True)
class CattaneoParams:
    """Parameters of the current-relaxation (telegrapher) response.

    Derived rates: gamma_D = 1/tau_D, gamma_s = 1/tau_s,
    gamma = gamma_D + gamma_s (= 1/tau_tilde),
    Gamma(k)^2 = c^2 k^2 + gamma_D gamma_s,
    diffusion constant c^2 tau_D and diffusion length sqrt(D tau_s).
    """

    c: float = 1.0
    tau_D: float = 1.0
    tau_s: float = 100.0
    chi0: float = 1.0
    T: float = 1.0
    Lambda: float = 50.0
    a: float = 0.1

    @property
    def gamma_D(self) -> float:
        return 1.0 / self.tau_D

    @property
    def gamma_s(self) -> float:
        return 1.0 / self.tau_s

    @property
    def gamma(self) -> float:
        return self.gamma_D + self.gamma_s

    @property
    def tau_tilde(self) -> float:
        return 1.0 / self.gamma

    def Gamma_sq(self, k):
        k = np.asarray(k, dtype=float)
        out = (self.c * k) ** 2 + self.gamma_D * self.gamma_s
        return out if out.ndim else float(out)

    @property
    def diffusion_constant(self) -> float:
        return self.c ** 2 * self.tau_D

    @property
    def diffusion_length(self) -> float:
        return math.sqrt(self.diffusion_constant * self.tau_s)


_DIPOLE_CONSTANT = 1.0  # mu0 * mu_B * g_s in natural units


@dataclass(frozen=True)
class NvParams:
    """Diffusive bath probed through the squared z-z dipole kernel.

    ``kernel_prefactor`` multiplies k^2 exp(-2 d k); the default is the
    squared Fourier kernel amplitude (dipole constant / 2)^2 * chi0.  Any
    other convention is one scalar away.
    """

    base: CattaneoParams = field(default_factory=CattaneoParams)
    d: float = 1.0
    kernel_prefactor: float | None = None

    @property
    def prefactor(self) -> float:
        if self.kernel_prefactor is not None:
            return self.kernel_prefactor
        return (_DIPOLE_CONSTANT / 2.0) ** 2 * self.base.chi0


@dataclass(frozen=True)
class ProbeGeometry:
    """Two probe qubits a distance r apart in a D-dimensional medium.

    ``delta`` is the qubit splitting; it multiplies a trivial phase on the
    emitted coherence and never enters the noise or response integrals.
    """

    dimension: int = 2
    r: float = 0.0
    lambda1: float = 1.0
    lambda2: float = 1.0
    delta: float = 0.0


# ---------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class SpaceTimeMap:
    """Rectangular (r, t) grid of one computed quantity plus run metadata."""

    r_values: tuple[float, ...]
    t_values: tuple[float, ...]
    values: tuple[tuple[float, ...], ...]  # shape (len(r), len(t)), r-major
    quantity: str  # one of n12, x12, n1, f
    metadata: dict

    def __post_init__(self):
        object.__setattr__(self, "r_values", tuple(float(v) for v in self.r_values))
        object.__setattr__(self, "t_values", tuple(float(v) for v in self.t_values))
        object.__setattr__(
            self, "values", tuple(tuple(float(v) for v in row) for row in self.values)
        )

    def check(self) -> None:
        if self.quantity not in ("n12", "x12", "n1", "f"):
            raise DomainError(f"unknown map quantity {self.quantity!r}")
        if len(self.values) != len(self.r_values):
            raise DomainError("row count does not match r axis")
        for row in self.values:
            if len(row) != len(self.t_values):
                raise DomainError("column count does not match t axis")
            for v in row:
                if not math.isfinite(v):
                    raise DomainError("map contains a non-finite value")
        if list(self.r_values) != sorted(self.r_values):
            raise DomainError("r axis is not sorted")
        if list(self.t_values) != sorted(self.t_values):
            raise DomainError("t axis is not sorted")

    def array(self) -> np.ndarray:
        return np.asarray(self.values)


# ---------------------------------------------------------------------------
# validation

def _positive(errors, path, **fields):
    for name, value in fields.items():
        if not (value > 0):
            errors.append((NonPositiveParameter, f"{path}.{name}: must be > 0, got {value}"))


def validation_errors(spec, dimension: int | None = None) -> list[tuple[type, str]]:
    """All contract violations of ``spec`` as (exception class, message).

    ``dimension`` supplies the spatial dimension context needed to detect
    divergent gapless regimes.
    """
    errors: list[tuple[type, str]] = []
    if isinstance(spec, GappedDispersion):
        _positive(errors, "gapped", omega0=spec.omega0, c=spec.c)
    elif isinstance(spec, GaplessDispersion):
        _positive(errors, "gapless", alpha=spec.alpha)
        if spec.z < 1.0:
            errors.append((NonPositiveParameter, f"gapless.z: must be >= 1, got {spec.z}"))
        if dimension is not None and dimension < spec.z:
            errors.append(
                (
                    DivergentRegime,
                    f"gapless.z: correlated noise is infrared divergent for "
                    f"dimension {dimension} < z = {spec.z}",
                )
            )
    elif isinstance(spec, TabulatedDispersion):
        if len(spec.k_samples) != len(spec.omega_samples):
            errors.append((DomainError, "tabulated: k and omega sample counts differ"))
        elif len(spec.k_samples) < 2:
            errors.append((DomainError, "tabulated: need at least two samples"))
        else:
            if list(spec.k_samples) != sorted(set(spec.k_samples)):
                errors.append((DomainError, "tabulated.k_samples: must be strictly increasing"))
            if any(w < 0 for w in spec.omega_samples):
                errors.append(
                    (NonPositiveParameter, "tabulated.omega_samples: must be >= 0 everywhere")
                )
    elif isinstance(spec, ThermalOccupation):
        if spec.T < 0:
            errors.append((NonPositiveParameter, f"thermal.T: must be >= 0, got {spec.T}"))
    elif isinstance(spec, DrivenGaussianOccupation):
        if spec.T < 0:
            errors.append((NonPositiveParameter, f"driven.T: must be >= 0, got {spec.T}"))
        if spec.amplitude < 0:
            errors.append(
                (NonPositiveParameter, f"driven.amplitude: must be >= 0, got {spec.amplitude}")
            )
        _positive(errors, "driven", sigma_dr=spec.sigma_dr)
        if spec.k_dr < 0:
            errors.append((NonPositiveParameter, f"driven.k_dr: must be >= 0, got {spec.k_dr}"))
    elif isinstance(spec, ParametricDriveOccupation):
        if spec.T < 0:
            errors.append((NonPositiveParameter, f"parametric.T: must be >= 0, got {spec.T}"))
        _positive(errors, "parametric", delta=spec.delta, Omega=spec.Omega)
        if spec.t_drive < 0:
            errors.append(
                (NonPositiveParameter, f"parametric.t_drive: must be >= 0, got {spec.t_drive}")
            )
    elif isinstance(spec, MomentumGrid):
        if not (spec.k_min >= 0):
            errors.append((NonPositiveParameter, f"grid.k_min: must be >= 0, got {spec.k_min}"))
        if not (spec.k_min < spec.k_max):
            errors.append((DomainError, f"grid: k_min {spec.k_min} must be < k_max {spec.k_max}"))
        if spec.n_points < 16:
            errors.append((DomainError, f"grid.n_points: must be >= 16, got {spec.n_points}"))
        if spec.spacing not in ("linear", "log"):
            errors.append((DomainError, f"grid.spacing: unknown {spec.spacing!r}"))
        elif spec.spacing == "log" and spec.k_min <= 0:
            errors.append((NonPositiveParameter, "grid.k_min: log spacing needs k_min > 0"))
    elif isinstance(spec, CattaneoParams):
        _positive(
            errors,
            "cattaneo",
            c=spec.c,
            tau_D=spec.tau_D,
            tau_s=spec.tau_s,
            chi0=spec.chi0,
            T=spec.T,
            Lambda=spec.Lambda,
            a=spec.a,
        )
    elif isinstance(spec, NvParams):
        errors.extend(validation_errors(spec.base))
        _positive(errors, "nv", d=spec.d)
        if spec.kernel_prefactor is not None and not (spec.kernel_prefactor > 0):
            errors.append(
                (NonPositiveParameter, f"nv.kernel_prefactor: must be > 0, got {spec.kernel_prefactor}")
            )
    elif isinstance(spec, ProbeGeometry):
        if spec.dimension not in (1, 2, 3):
            errors.append(
                (DimensionOutOfRange, f"geometry.dimension: must be 1, 2 or 3, got {spec.dimension}")
            )
        if spec.r < 0:
            errors.append((NonPositiveParameter, f"geometry.r: must be >= 0, got {spec.r}"))
        for name in ("lambda1", "lambda2", "delta"):
            if not math.isfinite(getattr(spec, name)):
                errors.append((DomainError, f"geometry.{name}: must be finite"))
    elif isinstance(spec, SpaceTimeMap):
        try:
            spec.check()
        except DomainError as exc:
            errors.append((DomainError, f"map: {exc}"))
    else:
        errors.append((DomainError, f"cannot validate object of type {type(spec).__name__}"))
    return errors


def validate(spec, dimension: int | None = None):
    """Return ``spec`` unchanged if all invariants hold, else raise.

    The exception class is the one matching the first violation; its
    message lists every violation with its field path.
    """
    errors = validation_errors(spec, dimension=dimension)
    if errors:
        cls = errors[0][0]
        raise cls("; ".join(msg for _, msg in errors))
    return spec


# ---------------------------------------------------------------------------
# serialization

_TAGS = {
    GappedDispersion: "gapped",
    GaplessDispersion: "gapless",
    TabulatedDispersion: "tabulated",
    ThermalOccupation: "thermal",
    DrivenGaussianOccupation: "driven-gaussian",
    ParametricDriveOccupation: "parametric-drive",
    MomentumGrid: "momentum-grid",
    CattaneoParams: "cattaneo",
    NvParams: "nv",
    ProbeGeometry: "geometry",
    SpaceTimeMap: "map",
}
_CLASSES = {v: k for k, v in _TAGS.items()}


def to_dict(spec) -> dict:
    """Tagged plain-dict form of any domain type (JSON friendly)."""
    if isinstance(spec, ProtocolKind):
        return {"type": "protocol", "tag": spec.value}
    tag = _TAGS.get(type(spec))
    if tag is None:
        raise DomainError(f"cannot serialize object of type {type(spec).__name__}")
    out = {"type": tag}
    if isinstance(spec, NvParams):
        out.update(
            base=to_dict(spec.base), d=spec.d, kernel_prefactor=spec.kernel_prefactor
        )
        return out
    if isinstance(spec, SpaceTimeMap):
        out.update(
            r_values=list(spec.r_values),
            t_values=list(spec.t_values),
            values=[list(row) for row in spec.values],
            quantity=spec.quantity,
            metadata=spec.metadata,
        )
        return out
    for name in spec.__dataclass_fields__:
        value = getattr(spec, name)
        if isinstance(value, tuple):
            value = list(value)
        out[name] = value
    return out


def from_dict(data: dict):
    """Inverse of :func:`to_dict`."""
    kind = data.get("type")
    if kind == "protocol":
        return ProtocolKind.parse(data["tag"])
    cls = _CLASSES.get(kind)
    if cls is None:
        raise DomainError(f"unknown serialized type {kind!r}")
    kwargs = {k: v for k, v in data.items() if k != "type"}
    if cls is NvParams:
        kwargs["base"] = from_dict(kwargs["base"])
    if cls is TabulatedDispersion:
        kwargs["k_samples"] = tuple(kwargs["k_samples"])
        kwargs["omega_samples"] = tuple(kwargs["omega_samples"])
    if cls is SpaceTimeMap:
        kwargs["r_values"] = tuple(kwargs["r_values"])
        kwargs["t_values"] = tuple(kwargs["t_values"])
        kwargs["values"] = tuple(tuple(row) for row in kwargs["values"])
    return cls(**kwargs)
