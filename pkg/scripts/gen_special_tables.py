"""Regenerate the Chebyshev coefficient tables embedded in t2pair.numerics.

The large-argument branches of bessel_j0 and bessel_k0 use Chebyshev fits of
the slowly varying amplitude/phase (J0) and exponentially rescaled (K0)
factors.  This script recomputes those coefficients from a high-precision
reference (mpmath) and prints them ready to paste into the source.  It is a
maintenance tool only; the package itself never imports mpmath.

Fitted forms, with s in [0, 1]:
  J0, x >= 8, s = (8/x)^2:
      J0(x) = sqrt(2/(pi*x)) * (P(s)*cos(x - pi/4) - (8/x)*Q(s)*sin(x - pi/4))
  K0, x >= 2, s = 2/x:
      K0(x) = exp(-x)/sqrt(x) * R(s)
"""

import mpmath as mp

mp.mp.dps = 40


def cheb_fit(fun, n):
    # Chebyshev interpolation on s in [0, 1] at Chebyshev points of the first kind.
    nodes = [0.5 + 0.5 * mp.cos(mp.pi * (k + 0.5) / n) for k in range(n)]
    vals = [fun(s) for s in nodes]
    coeffs = []
    for j in range(n):
        acc = mp.mpf(0)
        for k in range(n):
            acc += vals[k] * mp.cos(j * mp.pi * (k + 0.5) / n)
        coeffs.append(2 * acc / n)
    coeffs[0] /= 2
    return coeffs


def j0_pq(s):
    # P + i*(8/x)*Q from the Hankel function H0^(1) = sqrt(2/(pi x)) (P+iQtot) e^{i(x-pi/4)}
    if s == 0:
        return mp.mpf(1), mp.mpf(0)
    x = 8 / mp.sqrt(s)
    h = mp.hankel1(0, x)
    w = h * mp.sqrt(mp.pi * x / 2) * mp.e ** (-1j * (x - mp.pi / 4))
    return w.real, w.imag / (8 / x)


def k0_r(s):
    if s == 0:
        return mp.sqrt(mp.pi / 2)
    x = 2 / s
    return mp.besselk(0, x) * mp.exp(x) * mp.sqrt(x)


def emit(name, coeffs, tol=mp.mpf("1e-18")):
    while len(coeffs) > 1 and abs(coeffs[-1]) < tol:
        coeffs.pop()
    print(f"{name} = (")
    for c in coeffs:
        print(f"    {mp.nstr(c, 18)},")
    print(")")


emit("_J0_P_CHEB", cheb_fit(lambda s: j0_pq(s)[0], 24))
emit("_J0_Q_CHEB", cheb_fit(lambda s: j0_pq(s)[1], 24))
emit("_K0_R_CHEB", cheb_fit(k0_r, 28))
