"""Frequency filter functions of the three pulse protocols.

Closed forms (theta = omega*t/4, all limits at omega -> 0 analytic):

    Ramsey        4 sin^2(2 theta) / omega^2          -> t^2
    local echo    8i sin(2 theta) sin^2(theta) / omega^2 -> 0   (purely imaginary)
    global echo   16 sin^4(theta) / omega^2           -> 0

and the pole-free combination

    Ramsey - global + 2 local = (4/omega^2) (2 e^{i omega t/2} - e^{i omega t} - 1)
                              = t^2 (sin(theta)/theta)^2 e^{2 i theta}

Everything is expressed through sin(y)/y factors so no branch suffers
catastrophic cancellation; tiny arguments switch to a short series.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .model import ProtocolKind

__all__ = ["eval_filter", "filter_combination", "low_frequency_exponent"]

_SMALL = 1e-4  # |y| below this: 4th-order series, error < 1e-14 relative


def _sinc(y):
    """sin(y)/y with a series branch for tiny arguments."""
    y = np.asarray(y, dtype=float)
    small = np.abs(y) < _SMALL
    safe = np.where(small, 1.0, y)
    out = np.where(small, 1.0 - y * y / 6.0 + y ** 4 / 120.0, np.sin(safe) / safe)
    return out if out.ndim else float(out)


def eval_filter(kind: ProtocolKind, omega, t: float):
    """Value of the frequency filter for protocol ``kind`` at (omega, t).

    Ramsey and global-echo values are real and non-negative; the local
    echo is purely imaginary.  Total function of any real omega.
    """
    if t <= 0:
        raise DomainError(f"duration must be positive, got t={t}")
    omega = np.asarray(omega, dtype=float)
    scalar = omega.ndim == 0
    u = np.atleast_1d(omega) * t
    if kind is ProtocolKind.RAMSEY:
        out = (t * t * _sinc(u / 2.0) ** 2).astype(complex)
    elif kind is ProtocolKind.GLOBAL_SPIN_ECHO:
        # 16 sin^4(u/4)/omega^2 = t^2 (u^2/16) sinc^4(u/4)
        out = (t * t * u * u / 16.0 * _sinc(u / 4.0) ** 4).astype(complex)
    elif kind is ProtocolKind.LOCAL_SPIN_ECHO:
        out = 1j * (u * t * t / 4.0) * _sinc(u / 2.0) * _sinc(u / 4.0) ** 2
    else:
        raise DomainError(f"unknown protocol {kind!r}")
    return complex(out[0]) if scalar else out


def filter_combination(omega, t: float):
    """Ramsey - global-echo + 2*local-echo, evaluated without the 1/omega^2 pole.

    Equals (4/omega^2)(2 e^{i omega t/2} - e^{i omega t} - 1)
         = t^2 sinc^2(omega t/4) e^{i omega t / 2};
    the omega -> 0 limit is t^2 (the series expansion of the exponential
    form; the echo filters vanish there while the Ramsey one tends to t^2).
    """
    if t <= 0:
        raise DomainError(f"duration must be positive, got t={t}")
    omega = np.asarray(omega, dtype=float)
    scalar = omega.ndim == 0
    u = np.atleast_1d(omega) * t
    out = t * t * _sinc(u / 4.0) ** 2 * np.exp(0.5j * u)
    return complex(out[0]) if scalar else out


def low_frequency_exponent(kind: ProtocolKind) -> int:
    """Leading power of omega of |filter| as omega -> 0 at fixed t."""
    return {
        ProtocolKind.RAMSEY: 0,
        ProtocolKind.LOCAL_SPIN_ECHO: 1,
        ProtocolKind.GLOBAL_SPIN_ECHO: 2,
    }[kind]
