# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``_pykernels``: same signatures, C loops instead of
vectorized numpy.  Selected automatically at import when available."""

import numpy as np

from libc.math cimport exp, fabs, lgamma, sqrt

BACKEND_NAME = "cython"


cdef inline double complex _cpow(double complex base, int k) noexcept:
    cdef double complex out = 1.0
    cdef int i
    for i in range(k):
        out = out * base
    return out


def laguerre_values(int n, t):
    """Laguerre polynomial L_n evaluated elementwise on t (array or scalar)."""
    if n < 0:
        raise ValueError("polynomial degree must be >= 0")
    t_arr = np.ascontiguousarray(np.atleast_1d(np.asarray(t, dtype=np.float64)))
    out_arr = np.empty_like(t_arr)
    cdef const double[::1] tv = t_arr
    cdef double[::1] ov = out_arr
    cdef Py_ssize_t i, m = tv.shape[0]
    cdef int k
    cdef double prev, curr, nxt, x
    for i in range(m):
        x = tv[i]
        prev = 1.0
        if n == 0:
            ov[i] = prev
            continue
        curr = 1.0 - x
        for k in range(1, n):
            nxt = ((2 * k + 1 - x) * curr - k * prev) / (k + 1)
            prev = curr
            curr = nxt
        ov[i] = curr
    out = out_arr.reshape(np.shape(t))
    if np.ndim(t) == 0:
        return float(out_arr[0])
    return out


def displacement_matrix(z, int dim):
    """Dense dim x dim truncation of the displacement operator D(z)."""
    cdef double complex zc = z
    cdef double x = zc.real * zc.real + zc.imag * zc.imag
    cdef double gauss = exp(-x / 2)
    out_arr = np.zeros((dim, dim), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef int k, n
    cdef double prev, curr, nxt, ln, w
    cdef double complex zk, mzk
    for k in range(dim):
        zk = _cpow(zc, k)
        mzk = _cpow(-zc.conjugate(), k)
        w = exp(0.5 * (lgamma(1.0) - lgamma(k + 1.0)))
        prev = 1.0
        curr = 1.0 + k - x
        for n in range(dim - k):
            if n == 0:
                ln = prev
            else:
                ln = curr
                nxt = ((2 * n + k + 1 - x) * curr - (n + k) * prev) / (n + 1)
                prev = curr
                curr = nxt
            out[n + k, n] = w * zk * ln * gauss
            if k > 0:
                out[n, n + k] = w * mzk * ln * gauss
            w = w * sqrt((n + 1.0) / (n + 1.0 + k))
    return out_arr


def char_values(coeffs, zs):
    """<psi|D(z)|psi> for each z, with psi given by number-basis coeffs."""
    c_arr = np.ascontiguousarray(np.asarray(coeffs, dtype=np.complex128))
    z_arr = np.ascontiguousarray(np.atleast_1d(np.asarray(zs, dtype=np.complex128)).ravel())
    out_arr = np.empty(z_arr.shape[0], dtype=np.complex128)
    cdef const double complex[::1] cv = c_arr
    cdef const double complex[::1] zv = z_arr
    cdef double complex[::1] ov = out_arr
    cdef Py_ssize_t i, m = zv.shape[0]
    cdef int dim = cv.shape[0], k, n
    cdef Py_ssize_t idx
    # z-independent products conj(c[n+k]) c[n] sqrt(n!/(n+k)!), packed by offset
    cc_arr = np.empty(dim * (dim + 1) // 2, dtype=np.complex128)
    cdef double complex[::1] cc = cc_arr
    cdef double w
    idx = 0
    for k in range(dim):
        w = exp(-0.5 * lgamma(k + 1.0))
        for n in range(dim - k):
            cc[idx] = cv[n + k].conjugate() * cv[n] * w
            w = w * sqrt((n + 1.0) / (n + 1.0 + k))
            idx += 1
    cdef double x, prev, curr, nxt, ln
    cdef double complex zc, zk, acc, sk
    for i in range(m):
        zc = zv[i]
        x = zc.real * zc.real + zc.imag * zc.imag
        acc = 0.0
        zk = 1.0
        idx = 0
        for k in range(dim):
            sk = 0.0
            prev = 1.0
            curr = 1.0 + k - x
            for n in range(dim - k):
                if n == 0:
                    ln = prev
                else:
                    ln = curr
                    nxt = ((2 * n + k + 1 - x) * curr - (n + k) * prev) / (n + 1)
                    prev = curr
                    curr = nxt
                sk = sk + cc[idx] * ln
                idx += 1
            if k == 0:
                acc = acc + sk
            else:
                sk = zk * sk
                if k % 2 == 0:
                    acc = acc + sk + sk.conjugate()
                else:
                    acc = acc + sk - sk.conjugate()
            zk = zk * zc
        ov[i] = acc * exp(-x / 2)
    if np.ndim(zs) == 0:
        return complex(out_arr[0])
    return out_arr.reshape(np.shape(zs))


def coherent_overlaps(coeffs, zs):
    """<psi|eta_z> against the truncated coherent column, for each z."""
    c_arr = np.ascontiguousarray(np.asarray(coeffs, dtype=np.complex128))
    z_arr = np.ascontiguousarray(np.atleast_1d(np.asarray(zs, dtype=np.complex128)).ravel())
    out_arr = np.empty(z_arr.shape[0], dtype=np.complex128)
    cdef const double complex[::1] cv = c_arr
    cdef const double complex[::1] zv = z_arr
    cdef double complex[::1] ov = out_arr
    cdef Py_ssize_t i, m = zv.shape[0]
    cdef int dim = cv.shape[0], n
    inv_arr = 1.0 / np.sqrt(np.arange(1, max(dim, 2), dtype=np.float64))
    cdef double[::1] inv = inv_arr
    cdef double complex zc, term, acc
    cdef double x
    for i in range(m):
        zc = zv[i]
        x = zc.real * zc.real + zc.imag * zc.imag
        term = exp(-x / 2)
        acc = cv[0].conjugate() * term
        for n in range(1, dim):
            term = term * zc * inv[n - 1]
            acc = acc + cv[n].conjugate() * term
        ov[i] = acc
    if np.ndim(zs) == 0:
        return complex(out_arr[0])
    return out_arr.reshape(np.shape(zs))


def displaced_vectors(coeffs, zs):
    """Rows D(z) @ psi for each z; output shape (len(zs), dim)."""
    c_arr = np.ascontiguousarray(np.asarray(coeffs, dtype=np.complex128))
    z_arr = np.ascontiguousarray(np.atleast_1d(np.asarray(zs, dtype=np.complex128)).ravel())
    cdef const double complex[::1] cv = c_arr
    cdef const double complex[::1] zv = z_arr
    cdef int dim = cv.shape[0]
    out_arr = np.zeros((z_arr.shape[0], dim), dtype=np.complex128)
    cdef double complex[:, ::1] ov = out_arr
    cdef Py_ssize_t i, m = zv.shape[0], idx
    cdef int k, n
    # z-independent weighted coefficients, packed by offset
    lo_arr = np.empty(dim * (dim + 1) // 2, dtype=np.complex128)
    hi_arr = np.empty(dim * (dim + 1) // 2, dtype=np.complex128)
    cdef double complex[::1] lo = lo_arr
    cdef double complex[::1] hi = hi_arr
    cdef double w
    idx = 0
    for k in range(dim):
        w = exp(-0.5 * lgamma(k + 1.0))
        for n in range(dim - k):
            lo[idx] = w * cv[n]
            hi[idx] = w * cv[n + k]
            w = w * sqrt((n + 1.0) / (n + 1.0 + k))
            idx += 1
    cdef double x, prev, curr, nxt, ln, gauss
    cdef double complex zc, zk, mzk
    for i in range(m):
        zc = zv[i]
        x = zc.real * zc.real + zc.imag * zc.imag
        gauss = exp(-x / 2)
        zk = gauss
        mzk = gauss
        idx = 0
        for k in range(dim):
            prev = 1.0
            curr = 1.0 + k - x
            for n in range(dim - k):
                if n == 0:
                    ln = prev
                else:
                    ln = curr
                    nxt = ((2 * n + k + 1 - x) * curr - (n + k) * prev) / (n + 1)
                    prev = curr
                    curr = nxt
                ov[i, n + k] = ov[i, n + k] + lo[idx] * (zk * ln)
                if k > 0:
                    ov[i, n] = ov[i, n] + hi[idx] * (mzk * ln)
                idx += 1
            zk = zk * zc
            mzk = mzk * (-zc.conjugate())
    return out_arr
