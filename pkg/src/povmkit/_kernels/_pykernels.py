"""Pure-numpy implementations of the hot phase-space kernels.

Matrix elements of the displacement operator in the number basis follow the
associated-Laguerre closed form

    <m|D(z)|n> = sqrt(n!/m!) z^(m-n) exp(-|z|^2/2) L_n^(m-n)(|z|^2),   m >= n,

with <m|D(z)|n> = conj(<n|D(-z)|m>) for m < n.  All routines below reduce to
the stable three-term recurrence in the polynomial degree, vectorized over
evaluation points; a compiled twin with identical signatures lives in
``_ckernels.pyx``.
"""

import numpy as np
from scipy.special import gammaln

BACKEND_NAME = "python"


def laguerre_values(n, t):
    """Laguerre polynomial L_n evaluated elementwise on t (array or scalar)."""
    t = np.asarray(t, dtype=np.float64)
    if n < 0:
        raise ValueError("polynomial degree must be >= 0")
    prev = np.ones_like(t)
    if n == 0:
        return prev
    curr = 1.0 - t
    for k in range(1, n):
        prev, curr = curr, ((2 * k + 1 - t) * curr - k * prev) / (k + 1)
    return curr


def _offset_weights(dim, k):
    # w[n] = sqrt(n! / (n+k)!) for n = 0 .. dim-k-1
    n = np.arange(dim - k, dtype=np.float64)
    return np.exp(0.5 * (gammaln(n + 1) - gammaln(n + k + 1)))


def displacement_matrix(z, dim):
    """Dense dim x dim truncation of the displacement operator D(z)."""
    z = complex(z)
    x = abs(z) ** 2
    out = np.zeros((dim, dim), dtype=np.complex128)
    for k in range(dim):
        w = _offset_weights(dim, k)
        zk = z**k
        mzk = (-z.conjugate()) ** k
        prev = 1.0
        curr = 1.0 + k - x
        for n in range(dim - k):
            ln = prev if n == 0 else curr
            if n >= 1:
                prev, curr = curr, ((2 * n + k + 1 - x) * curr - (n + k) * prev) / (n + 1)
            out[n + k, n] = w[n] * zk * ln
            if k > 0:
                out[n, n + k] = w[n] * mzk * ln
    out *= np.exp(-x / 2)
    return out


def char_values(coeffs, zs):
    """<psi|D(z)|psi> for each z, with psi given by number-basis coeffs."""
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    zs = np.asarray(zs, dtype=np.complex128)
    dim = coeffs.shape[0]
    x = np.abs(zs) ** 2
    acc = np.zeros(zs.shape, dtype=np.complex128)
    zp = np.ones_like(zs)
    nzp = np.ones_like(zs)
    for k in range(dim):
        if k > 0:
            zp = zp * zs
            nzp = nzp * (-zs)
        w = _offset_weights(dim, k)
        cc = coeffs[k:].conj() * coeffs[: dim - k] * w
        sk = np.zeros(zs.shape, dtype=np.complex128)
        prev = np.ones_like(x)
        curr = 1.0 + k - x
        for n in range(dim - k):
            ln = prev if n == 0 else curr
            if n >= 1:
                prev, curr = curr, ((2 * n + k + 1 - x) * curr - (n + k) * prev) / (n + 1)
            sk = sk + cc[n] * ln
        if k == 0:
            acc += sk
        else:
            acc += zp * sk + np.conj(nzp * sk)
    return acc * np.exp(-x / 2)


def coherent_overlaps(coeffs, zs):
    """<psi|eta_z> against the truncated coherent column, for each z.

    The column holds the exact first ``len(coeffs)`` coefficients of eta_z
    (no renormalization), so the overlap is exact for states supported below
    the cutoff.
    """
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    zs = np.asarray(zs, dtype=np.complex128)
    dim = coeffs.shape[0]
    term = np.exp(-np.abs(zs) ** 2 / 2).astype(np.complex128)
    acc = coeffs[0].conjugate() * term
    for n in range(1, dim):
        term = term * zs / np.sqrt(n)
        acc = acc + coeffs[n].conjugate() * term
    return acc


def displaced_vectors(coeffs, zs):
    """Rows D(z) @ psi for each z; output shape (len(zs), dim)."""
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    zs = np.asarray(zs, dtype=np.complex128).ravel()
    dim = coeffs.shape[0]
    x = np.abs(zs) ** 2
    out = np.zeros((zs.shape[0], dim), dtype=np.complex128)
    zp = np.ones_like(zs)
    nzp = np.ones_like(zs)
    for k in range(dim):
        if k > 0:
            zp = zp * zs
            nzp = nzp * (-zs.conj())
        w = _offset_weights(dim, k)
        prev = np.ones_like(x)
        curr = 1.0 + k - x
        for n in range(dim - k):
            ln = prev if n == 0 else curr
            if n >= 1:
                prev, curr = curr, ((2 * n + k + 1 - x) * curr - (n + k) * prev) / (n + 1)
            out[:, n + k] += (w[n] * coeffs[n]) * (zp * ln)
            if k > 0:
                out[:, n] += (w[n] * coeffs[n + k]) * (nzp * ln)
    out *= np.exp(-x / 2)[:, None]
    return out
