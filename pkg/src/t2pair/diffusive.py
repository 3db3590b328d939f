"""Noise of a two-dimensional diffusive environment, bare or dipole-filtered.

The environment follows the current-relaxation (Cattaneo / telegrapher)
response, which interpolates between ballistic transport at short times
and diffusion beyond tau_D, with an overall relaxation tau_s.  In the
thermally dominated regime the per-mode accumulated noise has a closed
form built from the two complex mode frequencies

    w_pm = -i gamma/2 +- sqrt(Gamma_k^2 - gamma^2/4),

both lying in the lower half plane, so the noise always relaxes.  Probe
couplings are fixed at lambda_1 = lambda_2 = 1 throughout this module.

NV-style probes couple through the magnetic dipole kernel, which in
momentum space multiplies the bare noise by k^2 exp(-2 d k) (both probes
sit a height d above the plane); that factor acts as a band-pass around
k ~ 1/d.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, QuadratureNotConverged
from .model import CattaneoParams, NvParams, validate
from .numerics import bessel_j0, bessel_k0

__all__ = [
    "cattaneo_response",
    "fdt_correlation",
    "cattaneo_correlation",
    "mode_noise",
    "correlated_noise",
    "local_noise",
    "noise_map",
    "stationary_profile",
    "dipole_kernel_real",
    "dipole_kernel_fourier",
    "nv_form_factor",
]

_DEGENERATE_RADIUS = 1e-14  # |Gamma^2 - gamma^2/4| below this (in gamma^2) -> series


# ---------------------------------------------------------------------------
# response and correlation in (k, omega)

def cattaneo_response(k, omega, p: CattaneoParams):
    """Retarded response chi(k, omega) of the telegrapher equation.

    chi = -chi0 (Gamma_k^2 + i omega gamma_s) / (omega^2 - Gamma_k^2 - i omega gamma)

    in the exp(+i omega tau) transform convention used by the filter
    identities, so Im chi * sign(omega) <= 0 and the static limit is
    chi(k, 0) = chi0.
    """
    k = np.asarray(k, dtype=float)
    omega = np.asarray(omega, dtype=float)
    g2 = p.Gamma_sq(k)
    num = g2 + 1j * omega * p.gamma_s
    den = omega * omega - g2 - 1j * omega * p.gamma
    out = -p.chi0 * num / den
    return out if out.ndim else complex(out)


def fdt_correlation(chi_im, omega, T: float, mode: str = "full"):
    """Symmetric correlator from Im chi via the fluctuation-dissipation
    theorem: -Im chi * coth(omega/2T), or its classical (thermally
    dominated) limit -Im chi * 2T/omega.

    At omega = 0 both forms are 0 * inf on point values; this returns 0
    there (Im chi of any causal response vanishes at omega = 0, and the
    point carries no quadrature weight).  Use :func:`cattaneo_correlation`
    for the analytic omega -> 0 limit of the Cattaneo bath.
    """
    if T <= 0:
        raise DomainError(f"temperature must be positive, got {T}")
    chi_im = np.asarray(chi_im, dtype=float)
    omega = np.asarray(omega, dtype=float)
    x = omega / (2.0 * T)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if mode == "full":
            factor = 1.0 / np.tanh(x)
        elif mode == "classical":
            factor = 1.0 / x
        else:
            raise DomainError(f"unknown FDT mode {mode!r}")
        out = np.where(omega == 0.0, 0.0, -chi_im * factor)
    return out if out.ndim else float(out)


def cattaneo_correlation(k, omega, p: CattaneoParams, mode: str = "classical"):
    """C(k, omega) of the Cattaneo bath, nonnegative by construction:

        classical: 2 chi0 T (gamma_D Gamma^2 + gamma_s omega^2)
                   / ((omega^2 - Gamma^2)^2 + gamma^2 omega^2)
        full:      classical * (omega/2T) coth(omega/2T)

    finite at omega = 0 (analytic limit of the FDT expression).
    """
    k = np.asarray(k, dtype=float)
    omega = np.asarray(omega, dtype=float)
    g2 = p.Gamma_sq(k)
    num = p.gamma_D * g2 + p.gamma_s * omega * omega
    den = (omega * omega - g2) ** 2 + (p.gamma * omega) ** 2
    out = 2.0 * p.chi0 * p.T * num / den
    if mode == "full":
        x = omega / (2.0 * p.T)
        small = np.abs(x) < 1e-8
        safe = np.where(small, 1.0, x)
        out = out * np.where(small, 1.0 + x * x / 3.0, safe / np.tanh(safe))
    elif mode != "classical":
        raise DomainError(f"unknown FDT mode {mode!r}")
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# closed-form mode noise

def _mode_noise_complex(k, t: float, p: CattaneoParams):
    k = np.atleast_1d(np.asarray(k, dtype=float))
    g2 = p.Gamma_sq(k)
    gam = p.gamma
    disc = np.asarray(g2 - 0.25 * gam * gam, dtype=complex)
    s = np.sqrt(disc)

    def bracket(w):
        return (g2 - 1j * p.gamma_s * w) / w ** 3 * (1.0 - np.exp(-1j * w * t) - 1j * w * t)

    degenerate = np.abs(disc) < _DEGENERATE_RADIUS * gam * gam
    s_safe = np.where(degenerate, 1.0, s)
    wp = -0.5j * gam + s_safe
    wm = -0.5j * gam - s_safe
    out = p.chi0 * p.T / s_safe * (bracket(wp) - bracket(wm))

    if np.any(degenerate):
        # [g(w0+s) - g(w0-s)]/s -> 2 g'(w0) as the roots merge
        w0 = -0.5j * gam
        u = g2 - 1j * p.gamma_s * w0
        du = -1j * p.gamma_s
        v = 1.0 - np.exp(-1j * w0 * t) - 1j * w0 * t
        dv = 1j * t * (np.exp(-1j * w0 * t) - 1.0)
        gprime = (du * v + u * dv) / w0 ** 3 - 3.0 * u * v / w0 ** 4
        out = np.where(degenerate, 2.0 * p.chi0 * p.T * gprime, out)
    return out


def mode_noise(k, t: float, p: CattaneoParams):
    """Accumulated Ramsey noise of radial mode k after time t (closed form).

    Evaluated in complex arithmetic across the underdamped and overdamped
    branches; merged roots (|Gamma^2 - gamma^2/4| below 1e-14 gamma^2)
    switch to the derivative series.  The imaginary residue is checked to
    be below 1e-10 of the magnitude.
    """
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if t == 0:
        out = np.zeros_like(np.atleast_1d(np.asarray(k, dtype=float)))
        return float(out[0]) if np.ndim(k) == 0 else out
    validate(p)
    out = _mode_noise_complex(k, t, p)
    scale = np.max(np.abs(out)) or 1.0
    residue = np.max(np.abs(out.imag))
    if residue > 1e-10 * scale:
        raise QuadratureNotConverged(
            f"mode noise acquired an imaginary residue {residue:.3e} "
            f"({residue / scale:.3e} of magnitude)",
            value=out.real,
        )
    real = out.real
    return float(real[0]) if np.ndim(k) == 0 else real


# ---------------------------------------------------------------------------
# radial (Hankel) integrals; the environment is two-dimensional

def _hankel_map(r_values, t_values, p: CattaneoParams, form_factor,
                rel_tol: float, abs_tol: float, max_refine: int,
                workers: int = 1):
    rs = np.asarray(r_values, dtype=float)
    ts = np.asarray(t_values, dtype=float)
    base = 4096
    block_elems = 4_000_000
    prev = None
    for level in range(max_refine + 1):
        n = base * 2 ** level
        if (n + 1) * len(ts) > 6e7 or n > 2 ** 23:
            break  # stop refining rather than exhaust memory
        k = np.linspace(p.Lambda * 1e-9, p.Lambda, n + 1)
        w = np.full(n + 1, 2.0)
        w[1::2] = 4.0
        w[0] = w[-1] = 1.0
        w *= (k[1] - k[0]) / 3.0
        measure = w * k / (2.0 * math.pi)
        if form_factor is not None:
            measure = measure * form_factor(k)
        B = np.stack(
            [mode_noise(k, t, p) if t > 0 else np.zeros_like(k) for t in ts],
            axis=1,
        )
        vals = np.empty((len(rs), len(ts)))
        block = max(1, int(block_elems // k.size))
        blocks = [slice(i, min(i + block, len(rs)))
                  for i in range(0, len(rs), block)]

        def fill(sl):
            J = bessel_j0(np.outer(k, rs[sl]))
            vals[sl, :] = (J * measure[:, None]).T @ B

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
                return vals, True
        prev = vals
    return prev, False


def correlated_noise(r: float, t: float, p: CattaneoParams, form_factor=None,
                     rel_tol: float = 1e-7, abs_tol: float = 1e-13,
                     max_refine: int = 6) -> float:
    """Correlated dephasing at probe separation r and time t:

        integral_0^Lambda J0(k r) N_k(t) FF(k) k dk / (2 pi)

    with FF an optional momentum filter (see :func:`nv_form_factor`)."""
    validate(p)
    vals, ok = _hankel_map([r], [t], p, form_factor, rel_tol, abs_tol, max_refine)
    if not ok:
        raise QuadratureNotConverged(
            f"radial noise integral did not stabilize after {max_refine} refinements",
            value=float(vals[0, 0]),
        )
    return float(vals[0, 0])


def local_noise(t: float, p: CattaneoParams, form_factor=None, **kw) -> float:
    """Zero-separation limit of :func:`correlated_noise` (J0(0) = 1)."""
    return correlated_noise(0.0, t, p, form_factor=form_factor, **kw)


def noise_map(r_values, t_values, p: CattaneoParams, form_factor=None,
              rel_tol: float = 1e-7, abs_tol: float = 1e-13, max_refine: int = 6,
              workers: int = 1):
    """Correlated noise on the full (r, t) grid; returns (values, converged).

    The momentum grid is shared across the t partition at every refinement
    level, so the values do not depend on the worker count."""
    validate(p)
    return _hankel_map(r_values, t_values, p, form_factor, rel_tol, abs_tol,
                       max_refine, workers)


def stationary_profile(r, p: CattaneoParams):
    """Late-time spatial profile K0(r / l_s) / K0(a / l_s), valid for r >= a."""
    validate(p)
    r = np.asarray(r, dtype=float)
    if np.any(r < p.a):
        raise DomainError(f"stationary profile is defined for r >= a = {p.a}")
    scalar = r.ndim == 0
    out = bessel_k0(np.atleast_1d(r) / p.diffusion_length)
    out = out / bessel_k0(p.a / p.diffusion_length)
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# dipole kernel and NV filter

def dipole_kernel_real(r_vec, prefactor: float = 1.0) -> np.ndarray:
    """Magnetic dipole kernel (prefactor/(4 pi |r|^5)) (3 r_a r_b - d_ab r^2).

    ``prefactor`` bundles the physical constants (mu0 mu_B g_s); traceless
    and symmetric for every r, singular at r = 0.
    """
    r = np.asarray(r_vec, dtype=float)
    if r.shape != (3,):
        raise DomainError("r_vec must be a 3-vector")
    rr = float(np.dot(r, r))
    if rr == 0.0:
        raise DomainError("dipole kernel is singular at r = 0")
    return prefactor / (4.0 * math.pi * rr ** 2.5) * (
        3.0 * np.outer(r, r) - rr * np.eye(3)
    )


def dipole_kernel_fourier(q_vec, d: float, prefactor: float = 1.0) -> np.ndarray:
    """In-plane Fourier transform of the dipole kernel at height d:

        K(q) = -(prefactor/2) e^{-|q| d}
               [[qx^2/q, qx qy/q,  i qx],
                [qx qy/q, qy^2/q,  i qy],
                [i qx,    i qy,   -q  ]]

    (the overall sign is fixed by the discrete-transform oracle of the
    real-space kernel: the zz entry is +q/2 * prefactor * e^{-qd}).
    q = 0 returns the zero matrix, its analytic limit.
    """
    if d <= 0:
        raise DomainError(f"height d must be positive, got {d}")
    q_vec = np.asarray(q_vec, dtype=float)
    if q_vec.shape != (2,):
        raise DomainError("q_vec must be a 2-vector")
    qx, qy = q_vec
    q = math.hypot(qx, qy)
    if q == 0.0:
        return np.zeros((3, 3), dtype=complex)
    amp = -0.5 * prefactor * math.exp(-q * d)
    return amp * np.array(
        [
            [qx * qx / q, qx * qy / q, 1j * qx],
            [qx * qy / q, qy * qy / q, 1j * qy],
            [1j * qx, 1j * qy, -q],
        ]
    )


def nv_form_factor(k, nv: NvParams):
    """Momentum filter of dipole-coupled probes: prefactor k^2 e^{-2 d k},
    peaked at k = 1/d.  Feed as ``form_factor`` into the noise integrals."""
    validate(nv)
    k = np.asarray(k, dtype=float)
    out = nv.prefactor * k * k * np.exp(-2.0 * nv.d * k)
    return out if out.ndim else float(out)
