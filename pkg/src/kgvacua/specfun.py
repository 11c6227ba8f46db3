"""Special functions written from scratch: complex Gamma, Bessel J and I,
Airy Ai/Bi and Whittaker M/W.

Power series are used near the origin. Beyond a fixed radius the defining
ODE is continued with high order Taylor steps (``kernels.taylor_march``).
Recessive solutions are never marched outwards: Ai on z > 0 comes from an
integral representation, and W on the right half plane is marched inwards
from its large-|z| expansion.
"""
import cmath
import math

import numpy as np

from . import kernels
from .errors import DegenerateParameterError, DomainError, PoleError, SeriesBudgetError

# Lanczos coefficients, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)

BESSEL_SERIES_RADIUS = 6.0
BESSEL_MAX_ABS = 50.0
WHITTAKER_SERIES_RADIUS = 6.0
WHITTAKER_MAX_ABS = 30.0
WHITTAKER_ASYM_RADIUS = 60.0
WHITTAKER_ASYM_TERMS = 400
# W is marched in from the asymptotic region on |arg z| <= pi/4 down to
# WHITTAKER_RECESSIVE_MIN, and on the rest of Re z >= 0 down to WHITTAKER_RECESSIVE_EDGE
WHITTAKER_RECESSIVE_MIN = 0.01
WHITTAKER_RECESSIVE_EDGE = 3.0
AIRY_SERIES_RADIUS = 3.0
AIRY_RANGE = (-1000.0, 25.0)


def _pole_index(z):
    if z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real):
        return int(z.real)
    return None


def gamma_complex(z):
    """Gamma function for complex argument (Lanczos with reflection)."""
    z = complex(z)
    n = _pole_index(z)
    if n is not None:
        raise PoleError(n)
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * gamma_complex(1.0 - z))
    z = z - 1.0
    x = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        x += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _SQRT_2PI * cmath.exp((z + 0.5) * cmath.log(t) - t) * x


def rgamma_complex(z):
    """1/Gamma(z); zero at the poles."""
    z = complex(z)
    if _pole_index(z) is not None:
        return 0j
    return 1.0 / gamma_complex(z)


def _checked(value_terms, what):
    value, terms = value_terms
    if terms < 0:
        raise SeriesBudgetError(f"{what}: series did not converge within the term budget")
    return value


# --- Bessel ---------------------------------------------------------------

def _negative_integer(nu):
    if nu.imag == 0.0 and nu.real < 0 and nu.real == math.floor(nu.real):
        return int(-nu.real)
    return None


def _bessel_series(nu, z, sign):
    """Series for J (sign=-1) or I (sign=+1) away from integer-order reflection."""
    if z == 0:
        if nu == 0:
            return 1.0 + 0j
        if nu.real > 0:
            return 0j
        raise DomainError("Bessel function of this order is singular at z = 0")
    x = sign * z * z / 4.0
    return (z / 2.0) ** nu * rgamma_complex(nu + 1.0) * _checked(kernels.hyp0f1(nu + 1.0, x), "0F1")


def _bessel_pair_series(nu, z):
    """J_nu and J_nu' from the series (z != 0)."""
    j = _bessel_series(nu, z, -1.0)
    jp1 = _bessel_series(nu + 1.0, z, -1.0)
    return j, nu * j / z - jp1


def _bessel_value_deriv(nu, z):
    n = _negative_integer(nu)
    if n is not None:
        j, dj = _bessel_value_deriv(complex(n), z)
        s = -1.0 if n % 2 else 1.0
        return s * j, s * dj
    if abs(z) > BESSEL_MAX_ABS:
        raise DomainError(f"|z| = {abs(z):.3g} exceeds the Bessel range {BESSEL_MAX_ABS}")
    if abs(z) <= BESSEL_SERIES_RADIUS:
        return _bessel_pair_series(nu, z)
    z0 = BESSEL_SERIES_RADIUS * z / abs(z)
    j0, dj0 = _bessel_pair_series(nu, z0)
    return kernels.taylor_march(kernels.BESSEL, nu, 0.0, z0, j0, dj0, z)


def bessel_j(nu, z):
    """Bessel function of the first kind J_nu(z) for complex order and argument."""
    nu = complex(nu)
    z = complex(z)
    if z == 0:
        return _bessel_series(nu, z, -1.0) if _negative_integer(nu) is None else (1.0 + 0j if nu == 0 else 0j)
    return _bessel_value_deriv(nu, z)[0]


def bessel_j_jet(nu, z):
    """Array [J, J', J'', J'''] at z != 0; higher derivatives from Bessel's equation."""
    nu = complex(nu)
    z = complex(z)
    if z == 0:
        raise DomainError("derivative jet requires z != 0")
    j, d1 = _bessel_value_deriv(nu, z)
    return ode_jet(kernels.BESSEL, nu, 0.0, z, j, d1)


def bessel_i(nu, z):
    """Modified Bessel function I_nu(z) from its series (|z| <= 20)."""
    nu = complex(nu)
    z = complex(z)
    if abs(z) > 20.0:
        raise DomainError("bessel_i is series-only; |z| must not exceed 20")
    n = _negative_integer(nu)
    if n is not None:
        return _bessel_series(complex(n), z, 1.0)
    return _bessel_series(nu, z, 1.0)


# --- Airy -----------------------------------------------------------------

_AI0 = 3.0 ** (-2.0 / 3.0) / gamma_complex(2.0 / 3.0).real
_AIP0 = -(3.0 ** (-1.0 / 3.0)) / gamma_complex(1.0 / 3.0).real
_SQRT3 = math.sqrt(3.0)
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(240)


def _airy_series(z):
    f, df, g, dg, terms = kernels.airy_maclaurin(z)
    if terms < 0:
        raise SeriesBudgetError("Airy Maclaurin series did not converge")
    ai = _AI0 * f + _AIP0 * g
    dai = _AI0 * df + _AIP0 * dg
    bi = _SQRT3 * (_AI0 * f - _AIP0 * g)
    dbi = _SQRT3 * (_AI0 * df - _AIP0 * dg)
    return ai, dai, bi, dbi


def _ai_integral(x):
    """Ai and Ai' for x > 0 from exp(-zeta)/pi * int_0^inf exp(-sqrt(x) t^2) cos(t^3/3) dt."""
    rx = math.sqrt(x)
    upper = math.sqrt(45.0 / rx)
    t = 0.5 * upper * (_GL_NODES + 1.0)
    w = 0.5 * upper * _GL_WEIGHTS
    kern = np.exp(-rx * t * t) * np.cos(t ** 3 / 3.0)
    base = float(np.dot(w, kern))
    moment = float(np.dot(w, t * t * kern))
    pref = math.exp(-2.0 / 3.0 * x * rx) / math.pi
    ai = pref * base
    dai = -rx * ai - pref * moment / (2.0 * rx)
    return ai, dai


def _airy_value_deriv(z):
    lo, hi = AIRY_RANGE
    if not lo <= z <= hi:
        raise DomainError(f"Airy argument {z} outside [{lo}, {hi}]")
    if abs(z) <= AIRY_SERIES_RADIUS:
        return _airy_series(z)
    z0 = math.copysign(AIRY_SERIES_RADIUS, z)
    ai0, dai0, bi0, dbi0 = _airy_series(z0)
    bi, dbi = kernels.taylor_march(kernels.AIRY, 0.0, 0.0, z0, bi0, dbi0, z)
    if z < 0:
        ai, dai = kernels.taylor_march(kernels.AIRY, 0.0, 0.0, z0, ai0, dai0, z)
        return ai.real, dai.real, bi.real, dbi.real
    # Ai is recessive for z > 0; marching would amplify the Bi contamination.
    ai, dai = _ai_integral(z)
    return ai, dai, bi.real, dbi.real


def airy(z):
    """Return (Ai(z), Bi(z)) for real z."""
    ai, _, bi, _ = _airy_value_deriv(float(z))
    return ai, bi


def airy_jet(z):
    """Arrays [Ai, Ai', Ai'', Ai'''] and [Bi, ...]; higher derivatives from y'' = z y."""
    z = float(z)
    ai, dai, bi, dbi = _airy_value_deriv(z)
    return (ode_jet(kernels.AIRY, 0.0, 0.0, z, ai, dai).real,
            ode_jet(kernels.AIRY, 0.0, 0.0, z, bi, dbi).real)


# --- Whittaker ------------------------------------------------------------

def _whittaker_m_series(kappa, mu, z):
    a = mu - kappa + 0.5
    b = 1.0 + 2.0 * mu
    pref = cmath.exp(-z / 2.0) * z ** (mu + 0.5)
    f = _checked(kernels.hyp1f1(a, b, z), "1F1")
    df = a / b * _checked(kernels.hyp1f1(a + 1.0, b + 1.0, z), "1F1")
    m = pref * f
    return m, m * (-0.5 + (mu + 0.5) / z) + pref * df


def _whittaker_m(kappa, mu, z):
    if _pole_index(1.0 + 2.0 * mu) is not None:
        raise DegenerateParameterError(f"M_kappa,mu undefined for 1 + 2mu = {1 + 2 * mu}")
    if z == 0:
        raise DomainError("Whittaker functions are evaluated at z != 0")
    if abs(z) > WHITTAKER_MAX_ABS:
        raise DomainError(f"|z| = {abs(z):.3g} exceeds the Whittaker range {WHITTAKER_MAX_ABS}")
    if abs(z) <= WHITTAKER_SERIES_RADIUS:
        return _whittaker_m_series(kappa, mu, z)
    z0 = WHITTAKER_SERIES_RADIUS * z / abs(z)
    m0, dm0 = _whittaker_m_series(kappa, mu, z0)
    return kernels.taylor_march(kernels.WHITTAKER, kappa, mu, z0, m0, dm0, z)


def _whittaker_w_connection(kappa, mu, z):
    m1, dm1 = _whittaker_m(kappa, mu, z)
    m2, dm2 = _whittaker_m(kappa, -mu, z)
    c1 = gamma_complex(-2.0 * mu) * rgamma_complex(0.5 - mu - kappa)
    c2 = gamma_complex(2.0 * mu) * rgamma_complex(0.5 + mu - kappa)
    return c1 * m1 + c2 * m2, c1 * dm1 + c2 * dm2


def _integer_2mu(mu):
    two = 2.0 * mu
    return two.imag == 0.0 and two.real == round(two.real)


def _whittaker_w_terminating(kappa, mu, z):
    """W when 1/2 + mu - kappa = -n: U(-n, b, z) = (-1)^n (b)_n M(-n, b, z) is a polynomial."""
    a, b = 0.5 + mu - kappa, 1.0 + 2.0 * mu
    n = -int(round(a.real))
    poch = 1.0 + 0j
    for j in range(n):
        poch *= b + j
    sign = -1.0 if n % 2 else 1.0
    u = sign * poch * _checked(kernels.hyp1f1(a, b, z), "1F1")
    du = sign * poch * (a / b) * _checked(kernels.hyp1f1(a + 1.0, b + 1.0, z), "1F1") if n else 0j
    pref = cmath.exp(-z / 2.0) * z ** (mu + 0.5)
    w = pref * u
    return w, w * (-0.5 + (mu + 0.5) / z) + pref * du


def _terminating_mu(kappa, mu):
    """mu or -mu for which 1/2 + mu - kappa is a nonpositive integer, else None."""
    for m in (mu, -mu):
        a, b = 0.5 + m - kappa, 1.0 + 2.0 * m
        if _pole_index(a) is not None and _pole_index(b) is None:
            return m
    return None


def _use_recessive(z):
    if z.real < 0:
        return False
    if abs(z) >= WHITTAKER_RECESSIVE_EDGE:
        return True
    return abs(z) >= WHITTAKER_RECESSIVE_MIN and abs(z.imag) <= z.real


def _whittaker_w(kappa, mu, z):
    if z == 0:
        raise DomainError("Whittaker functions are evaluated at z != 0")
    m = _terminating_mu(kappa, mu)
    if m is not None:
        return _whittaker_w_terminating(kappa, m, z)
    if _use_recessive(z):
        if abs(z) > WHITTAKER_MAX_ABS:
            raise DomainError(f"|z| = {abs(z):.3g} exceeds the Whittaker range {WHITTAKER_MAX_ABS}")
        return _whittaker_w_recessive(kappa, mu, z)
    if not _integer_2mu(mu):
        return _whittaker_w_connection(kappa, mu, z)
    # W is even and entire in mu; remove the removable singularity by a
    # symmetric Richardson limit.
    if mu.real < 0:
        mu = -mu
    d = 1e-3

    def sym(delta):
        wp, dwp = _whittaker_w_connection(kappa, mu + delta, z)
        wm, dwm = _whittaker_w_connection(kappa, mu - delta, z)
        return 0.5 * (wp + wm), 0.5 * (dwp + dwm)

    # eliminate the delta^2 and delta^4 terms
    w1, dw1 = sym(d)
    w2, dw2 = sym(2 * d)
    w4, dw4 = sym(4 * d)
    return (64.0 * w1 - 20.0 * w2 + w4) / 45.0, (64.0 * dw1 - 20.0 * dw2 + dw4) / 45.0


def _whittaker_w_asymptotic(kappa, mu, z):
    """W and W' from the large-|z| expansion, valid for |arg z| < 3pi/2."""
    a, b = 0.5 + mu - kappa, 0.5 - mu - kappa
    s, ds, term = 1.0 + 0j, 0j, 1.0 + 0j
    for n in range(WHITTAKER_ASYM_TERMS):
        nxt = -term * (a + n) * (b + n) / ((n + 1) * z)
        if abs(nxt) >= abs(term) and n > 0:
            # optimal truncation point of the asymptotic series
            if abs(term) <= 1e-15 * abs(s):
                break
            raise SeriesBudgetError("Whittaker asymptotic series diverged before convergence")
        term = nxt
        s += term
        ds += -(n + 1) * term / z
        if abs(term) <= 1e-17 * abs(s):
            break
    else:
        raise SeriesBudgetError("Whittaker asymptotic series: term budget exhausted")
    pref = cmath.exp(-z / 2.0) * z ** kappa
    return pref * s, pref * ((-0.5 + kappa / z) * s + ds)


def _whittaker_w_recessive(kappa, mu, z):
    # start far out on the ray through z and continue inwards, where W grows
    r = max(WHITTAKER_ASYM_RADIUS, 2.0 * (abs(kappa) + abs(mu) + 1.0) ** 2)
    za = r * z / abs(z)
    w0, dw0 = _whittaker_w_asymptotic(kappa, mu, za)
    return kernels.taylor_march(kernels.WHITTAKER, kappa, mu, za, w0, dw0, z)


def whittaker(kappa, mu, z):
    """Return (M_{kappa,mu}(z), W_{kappa,mu}(z))."""
    kappa, mu, z = complex(kappa), complex(mu), complex(z)
    return _whittaker_m(kappa, mu, z)[0], _whittaker_w(kappa, mu, z)[0]


def whittaker_jet(kappa, mu, z):
    """Arrays [M, M', M'', M'''] and [W, ...]; higher derivatives from Whittaker's equation."""
    kappa, mu, z = complex(kappa), complex(mu), complex(z)
    out = []
    for y, dy in (_whittaker_m(kappa, mu, z), _whittaker_w(kappa, mu, z)):
        out.append(ode_jet(kernels.WHITTAKER, kappa, mu, z, y, dy))
    return out[0], out[1]


# --- jets and continuation along a path ------------------------------------

def ode_jet(kind, p1, p2, z, y, dy):
    """Derivatives 0..3 at z from (y, y') and the defining equation of kind."""
    z = complex(z)
    if kind == kernels.AIRY:
        return np.array([y, dy, z * y, y + z * dy], dtype=complex)
    if kind == kernels.BESSEL:
        nu2 = complex(p1) ** 2
        r = 1.0 - nu2 / (z * z)
        d2 = -dy / z - r * y
        d3 = -d2 / z + dy / (z * z) - r * dy - 2.0 * nu2 * y / z ** 3
        return np.array([y, dy, d2, d3])
    if kind == kernels.WHITTAKER:
        kappa, mu = complex(p1), complex(p2)
        c = 0.25 - mu * mu
        q = 0.25 - kappa / z - c / (z * z)
        dq = kappa / (z * z) + 2.0 * c / z ** 3
        return np.array([y, dy, q * y, dq * y + q * dy])
    raise ValueError(f"unknown equation kind {kind}")


def march_jets(kind, p1, p2, zs, y0, dy0):
    """Jets of one solution at the successive points zs, given (y, y') at zs[0].

    Each point is reached from its predecessor, so neighbouring values share
    their rounding history and finite differences of the result stay smooth.
    """
    zs = [complex(z) for z in zs]
    y, dy = complex(y0), complex(dy0)
    out = np.empty((len(zs), 4), dtype=complex)
    out[0] = ode_jet(kind, p1, p2, zs[0], y, dy)
    for i in range(1, len(zs)):
        y, dy = kernels.taylor_march(kind, p1, p2, zs[i - 1], y, dy, zs[i])
        out[i] = ode_jet(kind, p1, p2, zs[i], y, dy)
    return out
