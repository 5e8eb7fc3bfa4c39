# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled numeric kernels; semantics defined by `_ref.py`."""
import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log, fabs, hypot, INFINITY

cnp.import_array()


def eval_terms(double[:, ::1] midx, double[::1] coeffs, double[:, ::1] xi):
    """Scaled evaluation of a term table at a batch of probe points."""
    cdef Py_ssize_t n_terms = midx.shape[0]
    cdef Py_ssize_t n_modes = midx.shape[1]
    cdef Py_ssize_t n_probe = xi.shape[1]
    mant_np = np.zeros(n_probe)
    amant_np = np.zeros(n_probe)
    scale_np = np.zeros(n_probe)
    cdef double[::1] mant = mant_np
    cdef double[::1] amant = amant_np
    cdef double[::1] scale = scale_np
    if n_terms == 0:
        return mant_np, amant_np, scale_np
    expo_np = np.empty(n_terms)
    cdef double[::1] expo = expo_np
    cdef Py_ssize_t p, t, j
    cdef double s, e, w, acc, aacc
    for p in range(n_probe):
        s = -INFINITY
        for t in range(n_terms):
            e = 0.0
            for j in range(n_modes):
                e += midx[t, j] * xi[j, p]
            expo[t] = e
            if e > s:
                s = e
        acc = 0.0
        aacc = 0.0
        for t in range(n_terms):
            w = exp(expo[t] - s)
            acc += coeffs[t] * w
            aacc += fabs(coeffs[t]) * w
        mant[p] = acc
        amant[p] = aacc
        scale[p] = s
    return mant_np, amant_np, scale_np


cdef inline double _cmag(double complex z) noexcept:
    return hypot(z.real, z.imag)


def det_scaled(double complex[:, ::1] cmat, double complex[::1] gdiag,
               double[:, ::1] eta):
    """Scaled determinant of cmat + diag(gdiag*exp(eta)) per probe.

    Row-rescaled partial-pivot Gaussian elimination; the matrices here
    are at most 4x4.
    """
    cdef Py_ssize_t n_dim = eta.shape[0]
    cdef Py_ssize_t n_probe = eta.shape[1]
    mant_np = np.empty(n_probe, dtype=np.complex128)
    scale_np = np.empty(n_probe)
    cdef double complex[::1] mant = mant_np
    cdef double[::1] scale = scale_np
    work_np = np.empty((n_dim, n_dim), dtype=np.complex128)
    cdef double complex[:, ::1] work = work_np
    cdef Py_ssize_t p, i, j, col, row, piv
    cdef double lw, ssum, best, mag
    cdef double complex det, pivval, factor, tmp
    for p in range(n_probe):
        ssum = 0.0
        for i in range(n_dim):
            lw = eta[i, p] + log(_cmag(gdiag[i]))
            if lw < 0.0:
                lw = 0.0
            ssum += lw
            for j in range(n_dim):
                work[i, j] = cmat[i, j] * exp(-lw)
            work[i, i] = work[i, i] + gdiag[i] * exp(eta[i, p] - lw)
        det = 1.0
        for col in range(n_dim):
            piv = col
            best = _cmag(work[col, col])
            for row in range(col + 1, n_dim):
                mag = _cmag(work[row, col])
                if mag > best:
                    best = mag
                    piv = row
            if piv != col:
                for j in range(n_dim):
                    tmp = work[col, j]
                    work[col, j] = work[piv, j]
                    work[piv, j] = tmp
                det = -det
            pivval = work[col, col]
            if pivval == 0.0:
                det = 0.0
                break
            det = det * pivval
            for row in range(col + 1, n_dim):
                factor = work[row, col] / pivval
                for j in range(col + 1, n_dim):
                    work[row, j] = work[row, j] - factor * work[col, j]
        mant[p] = det
        scale[p] = ssum
    return mant_np, scale_np
