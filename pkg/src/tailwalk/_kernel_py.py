"""Pure-numpy cyclic Jacobi eigensolver for Hermitian matrices.

Reference implementation of the rotation kernel; the Cython module
``tailwalk._kernel_cy`` implements the identical sweep schedule.  Each
rotation zeroes one off-diagonal pair (p, q): the entry's phase is absorbed
into the plane first, then a real Givens angle annihilates it.  Sweeps are
row-cyclic with a skip threshold chosen so that skipping every entry implies
the off-diagonal Frobenius norm target is already met.
"""
import math

import numpy as np

KERNEL_NAME = "python"


def jacobi_eigh(a, tol_factor=1e-13, max_sweeps=60):
    """Diagonalize a Hermitian matrix by cyclic complex Jacobi rotations.

    Returns (eigenvalues, vectors, sweeps) with eigenvalues unsorted in the
    order the diagonal settles; callers sort.  Iterates until the
    off-diagonal Frobenius norm drops below tol_factor times the Frobenius
    norm of the input, or max_sweeps row-cyclic sweeps.
    """
    h = np.array(a, dtype=np.complex128, order="C")
    n = h.shape[0]
    v = np.eye(n, dtype=np.complex128)
    if n < 2:
        return h.diagonal().real.copy(), v, 0
    fro = float(np.linalg.norm(h))
    if fro == 0.0:
        return np.zeros(n), v, 0
    tol = tol_factor * fro
    thresh = tol / math.sqrt(n * (n - 1))
    sweeps = 0
    for _ in range(max_sweeps):
        # off-diagonal Frobenius norm, summed directly (no cancellation)
        sq = np.abs(h) ** 2
        np.fill_diagonal(sq, 0.0)
        if math.sqrt(float(sq.sum())) <= tol:
            break
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = h[p, q]
                r = abs(apq)
                if r <= thresh:
                    continue
                ph = apq / r
                tau = (h[q, q].real - h[p, p].real) / (2.0 * r)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # unitary plane rotation U: U[p,p]=ph*c, U[p,q]=ph*s,
                # U[q,p]=-s, U[q,q]=c ; apply A <- U^H A U, V <- V U
                rowp = h[p, :].copy()
                rowq = h[q, :].copy()
                h[p, :] = np.conj(ph) * c * rowp - s * rowq
                h[q, :] = np.conj(ph) * s * rowp + c * rowq
                colp = h[:, p].copy()
                colq = h[:, q].copy()
                h[:, p] = ph * c * colp - s * colq
                h[:, q] = ph * s * colp + c * colq
                h[p, q] = 0.0
                h[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = ph * c * vp - s * vq
                v[:, q] = ph * s * vp + c * vq
    return h.diagonal().real.copy(), v, sweeps
