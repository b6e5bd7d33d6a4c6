# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled cyclic Jacobi eigensolver for Hermitian matrices.

Same rotation schedule as tailwalk._kernel_py; see that module for the
algorithm description.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

KERNEL_NAME = "cython"


def jacobi_eigh(a, double tol_factor=1e-13, int max_sweeps=60):
    """Diagonalize a Hermitian matrix; returns (eigenvalues, vectors, sweeps)."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] h = \
        np.array(a, dtype=np.complex128, order="C")
    cdef Py_ssize_t n = h.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] v = np.eye(n, dtype=np.complex128)
    if n < 2:
        return h.diagonal().real.copy(), v, 0
    cdef double fro = float(np.linalg.norm(h))
    if fro == 0.0:
        return np.zeros(n), v, 0
    cdef double tol = tol_factor * fro
    cdef double thresh = tol / sqrt(n * (n - 1.0))
    cdef double complex[:, ::1] hm = h
    cdef double complex[:, ::1] vm = v
    cdef Py_ssize_t p, q, i, sweep
    cdef int sweeps = 0
    cdef double off2, r, tau, t, c, s, re, im
    cdef double complex apq, ph, phc, cphc, cphs, phs, xp, xq

    for sweep in range(max_sweeps):
        off2 = 0.0
        for p in range(n):
            for q in range(n):
                if p != q:
                    re = hm[p, q].real
                    im = hm[p, q].imag
                    off2 += re * re + im * im
        if sqrt(off2) <= tol:
            break
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = hm[p, q]
                r = sqrt(apq.real * apq.real + apq.imag * apq.imag)
                if r <= thresh:
                    continue
                ph = apq / r
                tau = (hm[q, q].real - hm[p, p].real) / (2.0 * r)
                if tau >= 0.0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                phc = ph * c        # U[p,p]
                phs = ph * s        # U[p,q]
                cphc = phc.conjugate()
                cphs = phs.conjugate()
                # rows: A <- U^H A
                for i in range(n):
                    xp = hm[p, i]
                    xq = hm[q, i]
                    hm[p, i] = cphc * xp - s * xq
                    hm[q, i] = cphs * xp + c * xq
                # columns: A <- A U
                for i in range(n):
                    xp = hm[i, p]
                    xq = hm[i, q]
                    hm[i, p] = phc * xp - s * xq
                    hm[i, q] = phs * xp + c * xq
                hm[p, q] = 0.0
                hm[q, p] = 0.0
                for i in range(n):
                    xp = vm[i, p]
                    xq = vm[i, q]
                    vm[i, p] = phc * xp - s * xq
                    vm[i, q] = phs * xp + c * xq
    return h.diagonal().real.copy(), v, sweeps
