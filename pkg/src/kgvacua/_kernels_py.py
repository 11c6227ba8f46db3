"""Pure-Python kernels.

Reference implementation of the hot loops; ``_kernels.pyx`` mirrors every
function here with the same argument order and the same floating point
evaluation order.
"""
import math

import numpy as np

TOL = 1e-14
MAX_TERMS = 200

# ODE kinds understood by taylor_march
AIRY, BESSEL, WHITTAKER = 0, 1, 2
_MARCH_TERMS = 60


def hyp0f1(b, x):
    """Sum of x^k / ((b)_k k!). Returns (value, terms used); terms = -1 on budget overflow."""
    b = complex(b)
    x = complex(x)
    term = 1.0 + 0.0j
    total = term
    small = 0
    for k in range(MAX_TERMS):
        term = term * x / ((b + k) * (k + 1))
        total = total + term
        if abs(term) <= TOL * abs(total):
            small += 1
            if small == 2:
                return total, k + 2
        else:
            small = 0
    return total, -1


def hyp1f1(a, b, z):
    a = complex(a)
    b = complex(b)
    z = complex(z)
    term = 1.0 + 0.0j
    total = term
    small = 0
    for k in range(MAX_TERMS):
        term = term * (a + k) * z / ((b + k) * (k + 1))
        total = total + term
        if abs(term) <= TOL * abs(total):
            small += 1
            if small == 2:
                return total, k + 2
        else:
            small = 0
    return total, -1


def airy_maclaurin(z):
    """Maclaurin pair (f, f', g, g') of y'' = z y with f(0)=1, f'(0)=0, g(0)=0, g'(0)=1."""
    z = float(z)
    # a_{n+3} = a_n / ((n+2)(n+3))
    f = 1.0
    df = 0.0
    g = z
    dg = 1.0
    tf = 1.0  # coefficient times z^n for the f series at n = 3k
    tg = z    # same for g at n = 3k + 1
    small = 0
    z3 = z * z * z
    for k in range(MAX_TERMS):
        n = 3 * k
        tf = tf * z3 / ((n + 2) * (n + 3))
        tg = tg * z3 / ((n + 3) * (n + 4))
        f += tf
        g += tg
        if z != 0.0:
            df += (n + 3) * tf / z
            dg += (n + 4) * tg / z
        scale = abs(f) + abs(g) + abs(df) + abs(dg)
        if abs(tf) + abs(tg) <= TOL * scale * 1e-2:
            small += 1
            if small == 2:
                return f, df, g, dg, k + 2
        else:
            small = 0
    return f, df, g, dg, -1


def _coefficients(kind, p1, p2, zc, K):
    """Taylor coefficients of P and Q about zc for y'' = P y' + Q y."""
    P = [0j] * K
    Q = [0j] * K
    if kind == AIRY:
        Q[0] = zc
        if K > 1:
            Q[1] = 1.0 + 0j
        return P, Q
    inv = 1.0 / zc
    pw = inv  # (-1)^j / zc^{j+1}
    if kind == BESSEL:
        nu2 = p1 * p1
        for j in range(K):
            P[j] = -pw
            Q[j] = nu2 * (j + 1) * pw * inv
            pw = -pw * inv
        Q[0] = Q[0] - 1.0
    else:
        c = 0.25 - p2 * p2
        for j in range(K):
            Q[j] = -p1 * pw - c * (j + 1) * pw * inv
            pw = -pw * inv
        Q[0] = Q[0] + 0.25
    return P, Q


def taylor_march(kind, p1, p2, z0, y0, dy0, z1):
    """Continue a solution of a linear second order ODE from z0 to z1 along a straight line.

    kind selects Airy (y''=zy), Bessel of order p1, or Whittaker with
    (kappa, mu) = (p1, p2). Returns (y, dy) at z1.
    """
    p1 = complex(p1)
    p2 = complex(p2)
    zc = complex(z0)
    z1 = complex(z1)
    y = complex(y0)
    dy = complex(dy0)
    K = _MARCH_TERMS
    total = abs(z1 - zc)
    if total == 0.0:
        return y, dy
    direction = (z1 - zc) / total
    done = 0.0
    while done < total:
        step = min(1.0, total - done)
        if kind == AIRY:
            step = min(step, 1.5 / math.sqrt(max(1.0, abs(zc))))
        else:
            step = min(step, 0.3 * abs(zc))
        if done + step > total * (1.0 - 1e-15):
            h = z1 - zc
            step = total - done
        else:
            h = direction * step
        P, Q = _coefficients(kind, p1, p2, zc, K)
        a = [0j] * (K + 2)
        a[0] = y
        a[1] = dy
        ny = y + dy * h
        ndy = dy
        hp = h  # h^(k+1)
        small = 0
        for k in range(K - 1):
            acc = 0j
            for j in range(k + 1):
                acc += P[j] * (k - j + 1) * a[k - j + 1] + Q[j] * a[k - j]
            a[k + 2] = acc / ((k + 2) * (k + 1))
            # contribution of a[k+2] h^(k+2) to y and (k+2) a[k+2] h^(k+1) to y'
            t_dy = (k + 2) * a[k + 2] * hp
            hp = hp * h
            t_y = a[k + 2] * hp
            ny += t_y
            ndy += t_dy
            if abs(t_y) + abs(t_dy) <= 1e-17 * (abs(ny) + abs(ndy)):
                small += 1
                if small == 3:
                    break
            else:
                small = 0
        y = ny
        dy = ndy
        zc = zc + h
        done += step
    return y, dy


def rk4_modes(fs, alphas, betas, lam, h, nsteps):
    """Propagators of phi'' + f phi' + (alpha*lam + beta) phi = 0 for every mode.

    fs, alphas, betas hold coefficient samples at t0 + j*h/2, j = 0..2*nsteps.
    Returns an array (n, 2, 2) mapping (phi, v) at t0 to (phi, v) at t0 + nsteps*h.
    """
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[0]
    # two fundamental columns per mode
    pa = np.ones(n)
    va = np.zeros(n)
    pb = np.zeros(n)
    vb = np.ones(n)
    hh = 0.5 * h
    h6 = h / 6.0
    for s in range(nsteps):
        f0 = fs[2 * s]
        f1 = fs[2 * s + 1]
        f2 = fs[2 * s + 2]
        w0 = alphas[2 * s] * lam + betas[2 * s]
        w1 = alphas[2 * s + 1] * lam + betas[2 * s + 1]
        w2 = alphas[2 * s + 2] * lam + betas[2 * s + 2]
        out = []
        for p, v in ((pa, va), (pb, vb)):
            k1p = v
            k1v = -f0 * v - w0 * p
            q = p + hh * k1p
            u = v + hh * k1v
            k2p = u
            k2v = -f1 * u - w1 * q
            q = p + hh * k2p
            u = v + hh * k2v
            k3p = u
            k3v = -f1 * u - w1 * q
            q = p + h * k3p
            u = v + h * k3v
            k4p = u
            k4v = -f2 * u - w2 * q
            out.append((p + h6 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
                        v + h6 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)))
        (pa, va), (pb, vb) = out
    res = np.empty((n, 2, 2))
    res[:, 0, 0] = pa
    res[:, 1, 0] = va
    res[:, 0, 1] = pb
    res[:, 1, 1] = vb
    return res
