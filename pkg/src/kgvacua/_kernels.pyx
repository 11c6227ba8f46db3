# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same signatures and evaluation order as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cdef extern from "complex.h" nogil:
    double cabs(double complex)

cdef double TOL = 1e-14
cdef enum:
    MAX_TERMS = 200
    MARCH_TERMS = 60

AIRY = 0
BESSEL = 1
WHITTAKER = 2


def hyp0f1(b, x):
    cdef double complex cb = b, cx = x
    cdef double complex term = 1.0, total = 1.0
    cdef int k, small = 0
    for k in range(MAX_TERMS):
        term = term * cx / ((cb + k) * (k + 1))
        total = total + term
        if cabs(term) <= TOL * cabs(total):
            small += 1
            if small == 2:
                return complex(total), k + 2
        else:
            small = 0
    return complex(total), -1


def hyp1f1(a, b, z):
    cdef double complex ca = a, cb = b, cz = z
    cdef double complex term = 1.0, total = 1.0
    cdef int k, small = 0
    for k in range(MAX_TERMS):
        term = term * (ca + k) * cz / ((cb + k) * (k + 1))
        total = total + term
        if cabs(term) <= TOL * cabs(total):
            small += 1
            if small == 2:
                return complex(total), k + 2
        else:
            small = 0
    return complex(total), -1


def airy_maclaurin(double z):
    cdef double f = 1.0, df = 0.0, g = z, dg = 1.0
    cdef double tf = 1.0, tg = z, z3 = z * z * z, scale
    cdef int k, n, small = 0
    for k in range(MAX_TERMS):
        n = 3 * k
        tf = tf * z3 / ((n + 2) * (n + 3))
        tg = tg * z3 / ((n + 3) * (n + 4))
        f += tf
        g += tg
        if z != 0.0:
            df += (n + 3) * tf / z
            dg += (n + 4) * tg / z
        scale = fabs(f) + fabs(g) + fabs(df) + fabs(dg)
        if fabs(tf) + fabs(tg) <= TOL * scale * 1e-2:
            small += 1
            if small == 2:
                return f, df, g, dg, k + 2
        else:
            small = 0
    return f, df, g, dg, -1


cdef void _coefficients(int kind, double complex p1, double complex p2, double complex zc,
                        double complex* P, double complex* Q, int K):
    cdef int j
    cdef double complex inv, pw, nu2, c
    for j in range(K):
        P[j] = 0
        Q[j] = 0
    if kind == 0:
        Q[0] = zc
        if K > 1:
            Q[1] = 1.0
        return
    inv = 1.0 / zc
    pw = inv
    if kind == 1:
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


def taylor_march(int kind, p1, p2, z0, y0, dy0, z1):
    cdef double complex cp1 = p1, cp2 = p2, zc = z0, cz1 = z1
    cdef double complex y = y0, dy = dy0, direction, h, ny, ndy, hp, acc, t_y, t_dy
    cdef double complex P[MARCH_TERMS]
    cdef double complex Q[MARCH_TERMS]
    cdef double complex a[MARCH_TERMS + 2]
    cdef int K = MARCH_TERMS, k, j, small
    cdef double total, done = 0.0, step
    total = cabs(cz1 - zc)
    if total == 0.0:
        return complex(y), complex(dy)
    direction = (cz1 - zc) / total
    while done < total:
        step = min(1.0, total - done)
        if kind == 0:
            step = min(step, 1.5 / sqrt(max(1.0, cabs(zc))))
        else:
            step = min(step, 0.3 * cabs(zc))
        if done + step > total * (1.0 - 1e-15):
            h = cz1 - zc
            step = total - done
        else:
            h = direction * step
        _coefficients(kind, cp1, cp2, zc, P, Q, K)
        a[0] = y
        a[1] = dy
        ny = y + dy * h
        ndy = dy
        hp = h
        small = 0
        for k in range(K - 1):
            acc = 0
            for j in range(k + 1):
                acc += P[j] * (k - j + 1) * a[k - j + 1] + Q[j] * a[k - j]
            a[k + 2] = acc / ((k + 2) * (k + 1))
            t_dy = (k + 2) * a[k + 2] * hp
            hp = hp * h
            t_y = a[k + 2] * hp
            ny += t_y
            ndy += t_dy
            if cabs(t_y) + cabs(t_dy) <= 1e-17 * (cabs(ny) + cabs(ndy)):
                small += 1
                if small == 3:
                    break
            else:
                small = 0
        y = ny
        dy = ndy
        zc = zc + h
        done += step
    return complex(y), complex(dy)


def rk4_modes(fs, alphas, betas, lam, double h, int nsteps):
    cdef const double[::1] cf = np.ascontiguousarray(fs, dtype=np.float64)
    cdef const double[::1] ca = np.ascontiguousarray(alphas, dtype=np.float64)
    cdef const double[::1] cb = np.ascontiguousarray(betas, dtype=np.float64)
    cdef const double[::1] cl = np.ascontiguousarray(lam, dtype=np.float64)
    cdef Py_ssize_t n = cl.shape[0], i
    cdef int s, col
    cdef double hh = 0.5 * h, h6 = h / 6.0
    cdef double f0, f1, f2, w0, w1, w2, p, v, q, u
    cdef double k1p, k1v, k2p, k2v, k3p, k3v, k4p, k4v
    res = np.empty((n, 2, 2))
    cdef double[:, :, ::1] r = res
    for i in range(n):
        for col in range(2):
            p = 1.0 if col == 0 else 0.0
            v = 0.0 if col == 0 else 1.0
            for s in range(nsteps):
                f0 = cf[2 * s]
                f1 = cf[2 * s + 1]
                f2 = cf[2 * s + 2]
                w0 = ca[2 * s] * cl[i] + cb[2 * s]
                w1 = ca[2 * s + 1] * cl[i] + cb[2 * s + 1]
                w2 = ca[2 * s + 2] * cl[i] + cb[2 * s + 2]
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
                p = p + h6 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
                v = v + h6 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
            r[i, 0, col] = p
            r[i, 1, col] = v
    return res
