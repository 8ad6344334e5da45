# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: character evaluation, Monte Carlo moments and
capped Dirichlet convolution.  All inner loops run without the GIL so callers
may split work across threads."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, sqrt, pow

cnp.import_array()


cdef void _eval_rows(const double[:, ::1] exps, const double[:] cr, const double[:] ci,
                     const double[:, ::1] angles, double[:] outr, double[:] outi) noexcept nogil:
    cdef Py_ssize_t s, k, j
    cdef Py_ssize_t S = angles.shape[0], m = exps.shape[0], P = exps.shape[1]
    cdef double ph, re, im, c, sn
    for s in range(S):
        re = 0.0
        im = 0.0
        for k in range(m):
            ph = 0.0
            for j in range(P):
                ph = ph + exps[k, j] * angles[s, j]
            c = cos(ph)
            sn = sin(ph)
            re = re + cr[k] * c - ci[k] * sn
            im = im + cr[k] * sn + ci[k] * c
        outr[s] = re
        outi[s] = im


def char_eval(exps, coeffs, angles):
    cdef const double[:, ::1] e = np.ascontiguousarray(exps, dtype=np.float64)
    cdef const double[:, ::1] a = np.ascontiguousarray(angles, dtype=np.float64)
    c = np.asarray(coeffs, dtype=np.complex128)
    cdef const double[:] cr = np.ascontiguousarray(c.real)
    cdef const double[:] ci = np.ascontiguousarray(c.imag)
    outr = np.empty(a.shape[0])
    outi = np.empty(a.shape[0])
    cdef double[:] orr = outr
    cdef double[:] oi = outi
    with nogil:
        _eval_rows(e, cr, ci, a, orr, oi)
    return outr + 1j * outi


def mc_moments(exps, coeffs, angles, double p):
    cdef const double[:, ::1] e = np.ascontiguousarray(exps, dtype=np.float64)
    cdef const double[:, ::1] a = np.ascontiguousarray(angles, dtype=np.float64)
    c = np.asarray(coeffs, dtype=np.complex128)
    cdef const double[:] cr = np.ascontiguousarray(c.real)
    cdef const double[:] ci = np.ascontiguousarray(c.imag)
    cdef Py_ssize_t s, k, j
    cdef Py_ssize_t S = a.shape[0], m = e.shape[0], P = e.shape[1]
    cdef double ph, re, im, w, s1 = 0.0, s2 = 0.0
    with nogil:
        for s in range(S):
            re = 0.0
            im = 0.0
            for k in range(m):
                ph = 0.0
                for j in range(P):
                    ph = ph + e[k, j] * a[s, j]
                re = re + cr[k] * cos(ph) - ci[k] * sin(ph)
                im = im + cr[k] * sin(ph) + ci[k] * cos(ph)
            w = pow(sqrt(re * re + im * im), p)
            s1 = s1 + w
            s2 = s2 + w * w
    return s1, s2


def convolve(fa, ca, fb, cb, long long cap):
    cdef const long long[:] A = np.ascontiguousarray(fa, dtype=np.int64)
    cdef const long long[:] B = np.ascontiguousarray(fb, dtype=np.int64)
    a_c = np.asarray(ca, dtype=np.complex128)
    b_c = np.asarray(cb, dtype=np.complex128)
    cdef const double[:] ar = np.ascontiguousarray(a_c.real)
    cdef const double[:] ai = np.ascontiguousarray(a_c.imag)
    cdef const double[:] br = np.ascontiguousarray(b_c.real)
    cdef const double[:] bi = np.ascontiguousarray(b_c.imag)
    cdef Py_ssize_t na = A.shape[0], nb = B.shape[0], i, j, n = 0
    if na == 0 or nb == 0:
        return np.zeros(0, np.int64), np.zeros(0, np.complex128), 0.0
    pf = np.empty(na * nb, dtype=np.int64)
    pr = np.empty(na * nb)
    pi = np.empty(na * nb)
    cdef long long[:] PF = pf
    cdef double[:] PR = pr
    cdef double[:] PI = pi
    cdef double disc = 0.0, vr, vi
    cdef long long f
    with nogil:
        for i in range(na):
            for j in range(nb):
                vr = ar[i] * br[j] - ai[i] * bi[j]
                vi = ar[i] * bi[j] + ai[i] * br[j]
                # inputs are >= 1 so A[i] > cap / B[j] is an overflow-safe test
                if A[i] > cap // B[j]:
                    disc = disc + sqrt(vr * vr + vi * vi)
                else:
                    f = A[i] * B[j]
                    PF[n] = f
                    PR[n] = vr
                    PI[n] = vi
                    n = n + 1
    order = np.argsort(pf[:n], kind="stable")
    fs = pf[:n][order]
    vals = (pr[:n] + 1j * pi[:n])[order]
    if n == 0:
        return np.zeros(0, np.int64), np.zeros(0, np.complex128), disc
    starts = np.flatnonzero(np.r_[True, fs[1:] != fs[:-1]])
    return fs[starts], np.add.reduceat(vals, starts), disc
