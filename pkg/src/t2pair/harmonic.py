"""Correlated dephasing and integrated response of harmonic baths.

Per mode of frequency w the retarded response is chi_k(tau) = -sin(w tau)
for tau > 0 (zero before), and the symmetric correlator is
C_k(tau) = (n_k + 1/2) cos(w tau).  Double time integrals over the pulse
window then reduce, per mode and protocol, to closed forms built from

    F(s) = (sin(w s) - w s) / w^2                 (response)
    t^2 sinc^2(w t / 2) (n_k + 1/2)               (noise, Ramsey window)

with the echo protocols obtained by carrying the sign flip at t/2 through
the piecewise integration: the response integral is F(t) for Ramsey,
2F(t/2) - F(t) for a local echo and 4F(t/2) - F(t) for a global one.
Momentum sums use the continuum normalization
integral d^D k / (2 pi)^D with the isotropic angular kernels from
:mod:`t2pair.numerics`; mode-list inputs stay available through the
``*_bracket`` functions for oracle comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DivergentRegime,
    DomainError,
    QuadratureNotConverged,
    ResonanceSingularity,
)
from .filters import _sinc
from .model import (
    DrivenGaussianOccupation,
    GaplessDispersion,
    GappedDispersion,
    MomentumGrid,
    ParametricDriveOccupation,
    ProbeGeometry,
    ProtocolKind,
    ThermalOccupation,
    validate,
)
from .numerics import angular_kernel

__all__ = [
    "mode_response",
    "mode_correlation",
    "thermal_n",
    "occupation_n",
    "parametric_occupation",
    "response_bracket",
    "noise_bracket",
    "echo_noise_bracket",
    "integrated_response",
    "correlated_noise",
    "local_noise",
    "local_noise_echo",
    "LongTimeLimits",
    "long_time_limits",
    "gapless_scaling_function",
    "noise_map",
    "response_map",
]


# ---------------------------------------------------------------------------
# per-mode kernels and brackets

def mode_response(omega_k: float, tau):
    """Retarded response of one mode: -sin(omega_k tau) for tau > 0, else 0."""
    tau = np.asarray(tau, dtype=float)
    out = np.where(tau > 0.0, -np.sin(omega_k * tau), 0.0)
    return out if out.ndim else float(out)


def mode_correlation(omega_k: float, n_k: float, tau):
    """Symmetric correlator of one mode: (n_k + 1/2) cos(omega_k tau)."""
    tau = np.asarray(tau, dtype=float)
    out = (n_k + 0.5) * np.cos(omega_k * tau)
    return out if out.ndim else float(out)


def _g(y):
    # (sin y - y) / y^2, series below 1e-3 to dodge the cancellation
    y = np.asarray(y, dtype=float)
    small = np.abs(y) < 1e-3
    safe = np.where(small, 1.0, y)
    series = -y / 6.0 + y ** 3 / 120.0 - y ** 5 / 5040.0
    return np.where(small, series, (np.sin(safe) - safe) / (safe * safe))


def response_bracket(omega, t: float, protocol: ProtocolKind = ProtocolKind.RAMSEY):
    """Per-mode double time integral of the response, including the 1/2.

    Ramsey value: sin(omega t)/(2 omega^2) - t/(2 omega); echoes follow
    from the sign-function decomposition.  Multiply by lambda1*lambda2 and
    sum over modes to get the integrated response.
    """
    omega = np.asarray(omega, dtype=float)
    if t == 0:
        out = np.zeros_like(omega)
        return out if out.ndim else float(out)
    u = omega * t
    f_t = t * t * _g(u)
    if protocol is ProtocolKind.RAMSEY:
        out = 0.5 * f_t
    else:
        f_half = 0.25 * t * t * _g(0.5 * u)
        if protocol is ProtocolKind.LOCAL_SPIN_ECHO:
            out = 0.5 * (2.0 * f_half - f_t)
        elif protocol is ProtocolKind.GLOBAL_SPIN_ECHO:
            out = 0.5 * (4.0 * f_half - f_t)
        else:
            raise DomainError(f"unknown protocol {protocol!r}")
    return out if out.ndim else float(out)


def noise_bracket(omega, n, t: float):
    """Per-mode correlated-noise weight 4 sin^2(omega t/2)(n + 1/2)/omega^2."""
    omega = np.asarray(omega, dtype=float)
    out = t * t * _sinc(0.5 * omega * t) ** 2 * (np.asarray(n) + 0.5)
    return out if out.ndim else float(out)


def echo_noise_bracket(omega, n, t: float):
    """Per-mode echoed local-noise weight 16 sin^4(omega t/4)(n + 1/2)/omega^2."""
    omega = np.asarray(omega, dtype=float)
    u = omega * t
    out = t * t * (u * u / 16.0) * _sinc(0.25 * u) ** 4 * (np.asarray(n) + 0.5)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# occupations

def thermal_n(omega, T: float):
    """Bose occupation 1/(exp(omega/T) - 1); zero at T = 0."""
    omega = np.asarray(omega, dtype=float)
    if T == 0:
        out = np.zeros_like(omega)
        return out if out.ndim else float(out)
    with np.errstate(divide="ignore", over="ignore"):
        out = np.where(omega > 0, 1.0 / np.expm1(np.minimum(omega / T, 700.0)), np.inf)
    return out if out.ndim else float(out)


def parametric_occupation(occ: ParametricDriveOccupation, disp, k):
    """Mode occupation and anomalous density after a parametric drive.

    For detuning eps = Omega - 2 omega_k and rate lam = sqrt(delta^2 -
    eps^2)/2 (imaginary off resonance, giving bounded oscillation):

        n(t) = n_th cosh^2(lam t) + (delta-eps)/(delta+eps) (n_th+1) sinh^2(lam t)
        m(t) = |(delta-eps)/(2 lam) (n_th + 1/2) sinh(2 lam t)|

    Raises ResonanceSingularity at the formula pole delta + eps = 0.
    """
    k = np.asarray(k, dtype=float)
    omega = np.asarray(disp.omega(k), dtype=float)
    eps = occ.Omega - 2.0 * omega
    if np.any(np.abs(occ.delta + eps) < 1e-12):
        raise ResonanceSingularity(
            "occupation formula has a pole at delta + (Omega - 2 omega_k) = 0"
        )
    n_th = thermal_n(omega, occ.T)
    lam = 0.5 * np.sqrt(np.asarray(occ.delta ** 2 - eps * eps, dtype=complex))
    lt = lam * occ.t_drive
    ratio = (occ.delta - eps) / (occ.delta + eps)
    n = np.real(n_th * np.cosh(lt) ** 2 + ratio * (n_th + 1.0) * np.sinh(lt) ** 2)

    # sinh(2 lam t)/(2 lam) is analytic in lam^2; series guard near lam = 0
    two_lt = 2.0 * lt
    small = np.abs(two_lt) < 1e-4
    lam_safe = np.where(small, 1.0, lam)
    sinh_over = np.where(
        small,
        occ.t_drive * (1.0 + two_lt * two_lt / 6.0),
        np.sinh(np.where(small, 0.0, two_lt)) / (2.0 * lam_safe),
    )
    m = np.abs((occ.delta - eps) * (n_th + 0.5) * sinh_over)
    if n.ndim == 0:
        return float(n), float(m)
    return n, m


def occupation_n(occ, disp, k):
    """Occupation n_k for any occupation spec (anomalous densities are
    reported by :func:`parametric_occupation` but never folded in here)."""
    k = np.asarray(k, dtype=float)
    if isinstance(occ, ThermalOccupation):
        return thermal_n(disp.omega(k), occ.T)
    if isinstance(occ, DrivenGaussianOccupation):
        bump = occ.amplitude * np.exp(-(((np.abs(k) - occ.k_dr) / occ.sigma_dr) ** 2))
        return thermal_n(disp.omega(k), occ.T) + bump
    if isinstance(occ, ParametricDriveOccupation):
        return parametric_occupation(occ, disp, k)[0]
    raise DomainError(f"unknown occupation spec {type(occ).__name__}")


# ---------------------------------------------------------------------------
# continuum momentum integrals

def _effective_kmin(disp, grid: MomentumGrid) -> float:
    # gapless integrands can be singular (integrably) at k = 0; nudge the
    # lower edge off zero, which changes the integral by o(tolerance)
    if isinstance(disp, GaplessDispersion) and grid.k_min == 0.0:
        return grid.k_max * 1e-9
    return grid.k_min


def _nodes_weights(grid: MomentumGrid, k_min: float, level: int):
    base = grid.n_points - 1
    base += base % 2
    n = base * (2 ** level)
    if grid.spacing == "log":
        x = np.linspace(math.log(k_min), math.log(grid.k_max), n + 1)
        k = np.exp(x)
        jac = k * (x[1] - x[0])
    else:
        k = np.linspace(k_min, grid.k_max, n + 1)
        jac = np.full(n + 1, k[1] - k[0])
    w = np.full(n + 1, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return k, w * jac / 3.0


_BLOCK_ELEMS = 4_000_000  # cap on angular-matrix block size (elements)


def _radial_map(weight_fn, dimension: int, r_values, t_count: int,
                grid: MomentumGrid, k_min: float,
                rel_tol: float, abs_tol: float, max_refine: int, workers: int = 1):
    """Integrate weight_fn(k, t_slice)[k, t] * angular(D, k r) * k^(D-1)/(2 pi)^D dk
    for every (r, t) pair, doubling the grid until the map stabilizes.

    The angular matrix is built in bounded r-blocks (optionally across a
    thread pool); every block sees the same momentum grid at every
    refinement level, so the result is identical for any worker count.
    Returns (values[r, t], converged, levels_used).
    """
    rs = np.asarray(r_values, dtype=float)
    prev = None
    for level in range(max_refine + 1):
        k, w = _nodes_weights(grid, k_min, level)
        if k.size * t_count > 6e7 or k.size > 2 ** 23:
            break  # stop refining rather than exhaust memory
        measure = w * k ** (dimension - 1) / (2.0 * np.pi) ** dimension
        bt = weight_fn(k, slice(None))  # [k, t]
        vals = np.empty((len(rs), t_count))
        block = max(1, int(_BLOCK_ELEMS // k.size))
        blocks = [slice(i, min(i + block, len(rs))) for i in range(0, len(rs), block)]

        def fill(sl):
            ang = angular_kernel(dimension, np.outer(k, rs[sl]))
            vals[sl, :] = (ang * measure[:, None]).T @ bt

        if workers > 1 and len(blocks) > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=min(workers, len(blocks))) as pool:
                list(pool.map(fill, blocks))
        else:
            for sl in blocks:
                fill(sl)
        if prev is not None:
            scale = np.max(np.abs(vals))
            if np.max(np.abs(vals - prev)) <= max(abs_tol, rel_tol * scale):
                return vals, True, level
        prev = vals
    return prev, False, max_refine


def _scalar_radial(weight_fn, dimension, r, grid, k_min, rel_tol, abs_tol, max_refine, what):
    vals, ok, _ = _radial_map(
        weight_fn, dimension, [r], 1, grid, k_min, rel_tol, abs_tol, max_refine
    )
    if not ok:
        raise QuadratureNotConverged(
            f"{what}: momentum integral did not stabilize after {max_refine} refinements",
            value=float(vals[0, 0]),
        )
    return float(vals[0, 0])


def integrated_response(
    disp,
    geom: ProbeGeometry,
    t: float,
    grid: MomentumGrid,
    protocol: ProtocolKind = ProtocolKind.RAMSEY,
    rel_tol: float = 1e-8,
    abs_tol: float = 1e-13,
    max_refine: int = 8,
) -> float:
    """Integrated response accumulated over [0, t] for the given protocol."""
    validate(disp, dimension=geom.dimension)
    validate(geom)
    validate(grid)
    if t == 0:
        return 0.0
    lam = geom.lambda1 * geom.lambda2
    k_min = _effective_kmin(disp, grid)

    def weight(k, _sl):
        return lam * response_bracket(disp.omega(k), t, protocol)[:, None]

    return _scalar_radial(
        weight, geom.dimension, geom.r, grid, k_min, rel_tol, abs_tol, max_refine,
        "integrated_response",
    )


def correlated_noise(
    disp,
    occ,
    geom: ProbeGeometry,
    t: float,
    grid: MomentumGrid,
    rel_tol: float = 1e-8,
    abs_tol: float = 1e-13,
    max_refine: int = 8,
) -> float:
    """Correlated dephasing of the two probes after a Ramsey window of t."""
    validate(disp, dimension=geom.dimension)
    validate(geom)
    validate(grid)
    if t == 0:
        return 0.0
    lam = geom.lambda1 * geom.lambda2
    k_min = _effective_kmin(disp, grid)

    def weight(k, _sl):
        n = occupation_n(occ, disp, k)
        return lam * noise_bracket(disp.omega(k), n, t)[:, None]

    return _scalar_radial(
        weight, geom.dimension, geom.r, grid, k_min, rel_tol, abs_tol, max_refine,
        "correlated_noise",
    )


def local_noise(disp, occ, dimension: int, lam: float, t: float, grid: MomentumGrid,
                **kw) -> float:
    """Single-qubit accumulated noise (half the zero-separation correlated
    noise at equal couplings)."""
    geom = ProbeGeometry(dimension=dimension, r=0.0, lambda1=lam, lambda2=lam)
    return 0.5 * correlated_noise(disp, occ, geom, t, grid, **kw)


def local_noise_echo(disp, occ, dimension: int, lam: float, t: float,
                     grid: MomentumGrid, rel_tol: float = 1e-8,
                     abs_tol: float = 1e-13, max_refine: int = 8) -> float:
    """Single-qubit noise under either spin echo (both echoes filter the
    local noise identically, through the global-echo frequency filter)."""
    validate(disp, dimension=dimension)
    validate(grid)
    if t == 0:
        return 0.0
    k_min = _effective_kmin(disp, grid)

    def weight(k, _sl):
        n = occupation_n(occ, disp, k)
        return 0.5 * lam * lam * echo_noise_bracket(disp.omega(k), n, t)[:, None]

    return _scalar_radial(
        weight, dimension, 0.0, grid, k_min, rel_tol, abs_tol, max_refine,
        "local_noise_echo",
    )


# ---------------------------------------------------------------------------
# long-time limits (gapped baths)

@dataclass(frozen=True)
class LongTimeLimits:
    """Late-window behaviour: response grows linearly with this slope while
    the time-averaged noise sits at the plateau."""

    response_slope: float
    noise_plateau: float


def long_time_limits(disp, occ, geom: ProbeGeometry, grid: MomentumGrid,
                     rel_tol: float = 1e-9, abs_tol: float = 1e-14,
                     max_refine: int = 8) -> LongTimeLimits:
    if not isinstance(disp, GappedDispersion):
        raise DivergentRegime(
            "long-time limits require a gapped spectrum (min omega_k > 0)"
        )
    validate(disp)
    validate(geom)
    lam = geom.lambda1 * geom.lambda2
    k_min = grid.k_min

    def w_slope(k, _sl):
        return (-0.5 * lam / disp.omega(k))[:, None]

    def w_plateau(k, _sl):
        n = occupation_n(occ, disp, k)
        return (lam * (1.0 + 2.0 * n) / disp.omega(k) ** 2)[:, None]

    slope = _scalar_radial(w_slope, geom.dimension, geom.r, grid, k_min,
                           rel_tol, abs_tol, max_refine, "long_time_limits")
    plateau = _scalar_radial(w_plateau, geom.dimension, geom.r, grid, k_min,
                             rel_tol, abs_tol, max_refine, "long_time_limits")
    return LongTimeLimits(response_slope=slope, noise_plateau=plateau)


# ---------------------------------------------------------------------------
# gapless scaling function

def gapless_scaling_function(dimension: int, z: float, u: float,
                             grid: MomentumGrid | None = None,
                             rel_tol: float = 1e-7, abs_tol: float = 1e-12,
                             max_refine: int = 8) -> float:
    """Shape function of the gapless correlated noise.

        f(u) = int_0^inf dk k^(D-1)/(2 pi)^D sin^2(k^z/2)/k^(3z)
               * angular(D, k u^(1/z)),     u = r^z / (alpha t)

    so that the correlated noise equals
    4 lambda1 lambda2 alpha^(-D/z) T t^(3-D/z) f(u) in the classical
    (high-temperature) regime.  Convergent only for z <= D < 3z; the
    marginal case D = 3z grows logarithmically with the cutoff and must be
    handled by a direct momentum integral instead.
    """
    if dimension < z or dimension >= 3 * z:
        raise DivergentRegime(
            f"scaling function defined for z <= D < 3z, got D={dimension}, z={z}"
        )
    if u < 0:
        raise DomainError(f"u must be >= 0, got {u}")
    if grid is None:
        grid = MomentumGrid(k_min=1e-9, k_max=80.0, n_points=8193)
    x = u ** (1.0 / z)

    def weight(k, _sl):
        val = np.sin(0.5 * k ** z) ** 2 / k ** (3.0 * z)
        return val[:, None]

    return _scalar_radial(
        weight, dimension, x, grid, max(grid.k_min, grid.k_max * 1e-12),
        rel_tol, abs_tol, max_refine, "gapless_scaling_function",
    )


# ---------------------------------------------------------------------------
# batched maps

def noise_map(disp, occ, geom: ProbeGeometry, r_values, t_values,
              grid: MomentumGrid, rel_tol: float = 1e-7, abs_tol: float = 1e-12,
              max_refine: int = 8, workers: int = 1):
    """Correlated noise on the full (r, t) grid.

    Returns (values[r, t], converged flag).  The whole map is evaluated on
    a shared momentum grid at every refinement level, so the result does
    not depend on the worker count.
    """
    validate(disp, dimension=geom.dimension)
    validate(grid)
    lam = geom.lambda1 * geom.lambda2
    k_min = _effective_kmin(disp, grid)
    ts = np.asarray(t_values, dtype=float)

    def weight(k, sl):
        n = occupation_n(occ, disp, k)
        omega = disp.omega(k)
        return lam * np.stack(
            [noise_bracket(omega, n, t) if t > 0 else np.zeros_like(k)
             for t in ts[sl]],
            axis=1,
        )

    vals, ok, _ = _radial_map(weight, geom.dimension, r_values, len(ts), grid,
                              k_min, rel_tol, abs_tol, max_refine, workers)
    return vals, ok


def response_map(disp, geom: ProbeGeometry, r_values, t_values,
                 grid: MomentumGrid, protocol: ProtocolKind = ProtocolKind.RAMSEY,
                 rel_tol: float = 1e-7, abs_tol: float = 1e-12,
                 max_refine: int = 8, workers: int = 1):
    """Integrated response on the full (r, t) grid; see :func:`noise_map`."""
    validate(disp, dimension=geom.dimension)
    validate(grid)
    lam = geom.lambda1 * geom.lambda2
    k_min = _effective_kmin(disp, grid)
    ts = np.asarray(t_values, dtype=float)

    def weight(k, sl):
        omega = disp.omega(k)
        return lam * np.stack(
            [response_bracket(omega, t, protocol) if t > 0 else np.zeros_like(k)
             for t in ts[sl]],
            axis=1,
        )

    vals, ok, _ = _radial_map(weight, geom.dimension, r_values, len(ts), grid,
                              k_min, rel_tol, abs_tol, max_refine, workers)
    return vals, ok
