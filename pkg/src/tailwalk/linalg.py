"""Hermitian eigensolver facade and matrix-exponential application.

The eigensolver is a cyclic complex Jacobi rotation kernel: simple, robust,
dependency-free, and accurate for the moderate sizes this package works with.
A compiled Cython kernel is preferred when present; the numpy fallback kernel
implements the identical sweep schedule (set ``TAILWALK_FORCE_PYTHON=1`` to
force the fallback).  Results are deterministic: eigenvalues are returned in
ascending order, ties broken by the lowest original column index, and
degenerate clusters are re-orthonormalized by Gram-Schmidt in index order.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

if os.environ.get("TAILWALK_FORCE_PYTHON"):
    from . import _kernel_py as _kernel
    HAVE_COMPILED = False
else:
    try:
        from . import _kernel_cy as _kernel  # type: ignore[attr-defined]
        HAVE_COMPILED = True
    except ImportError:
        from . import _kernel_py as _kernel
        HAVE_COMPILED = False

KERNEL_NAME = _kernel.KERNEL_NAME

__all__ = [
    "EigDecomposition",
    "hermitian_eig",
    "expm_apply",
    "hermitian_defect",
    "HAVE_COMPILED",
    "KERNEL_NAME",
]

_HERM_TOL = 1e-13
_CLUSTER_TOL = 1e-10


def hermitian_defect(m: np.ndarray) -> float:
    """max |M[i][j] - conj(M[j][i])| over all entries."""
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def _as_square(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    return a


@dataclass(frozen=True, eq=False)
class EigDecomposition:
    """Ascending eigenvalues and matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    vectors: np.ndarray

    def expm_apply(self, t: float, vec: np.ndarray) -> np.ndarray:
        """Apply exp(-i t M) to vec through the spectral decomposition."""
        coeff = self.vectors.conj().T @ np.asarray(vec, dtype=np.complex128)
        return self.vectors @ (np.exp(-1j * t * self.eigenvalues) * coeff)

    def propagate_many(self, ts: np.ndarray, vec: np.ndarray) -> np.ndarray:
        """exp(-i t M) vec for each t; rows indexed by t."""
        coeff = self.vectors.conj().T @ np.asarray(vec, dtype=np.complex128)
        phases = np.exp(-1j * np.outer(np.asarray(ts, float), self.eigenvalues))
        return (phases * coeff) @ self.vectors.T


def _cluster_orthonormalize(w: np.ndarray, v: np.ndarray, scale: float):
    """Gram-Schmidt within degenerate eigenvalue clusters, in index order."""
    n = w.size
    tol = _CLUSTER_TOL * max(scale, 1.0)
    start = 0
    while start < n:
        end = start + 1
        while end < n and w[end] - w[end - 1] <= tol:
            end += 1
        if end - start > 1:
            block = v[:, start:end]
            for j in range(block.shape[1]):
                col = block[:, j]
                for _ in range(2):
                    col = col - block[:, :j] @ (block[:, :j].conj().T @ col)
                nrm = np.linalg.norm(col)
                block[:, j] = col / nrm
        start = end


def hermitian_eig(m) -> EigDecomposition:
    """Full eigendecomposition of a Hermitian matrix.

    Rejects non-Hermitian input (defect above 1e-13 of the Frobenius norm).
    """
    a = _as_square(m)
    n = a.shape[0]
    if n == 0:
        return EigDecomposition(np.zeros(0), np.zeros((0, 0), dtype=np.complex128))
    fro = float(np.linalg.norm(a))
    if hermitian_defect(a) > _HERM_TOL * max(fro, 1e-300):
        raise ValueError("matrix is not Hermitian")
    h = 0.5 * (a + a.conj().T)
    w, v, _ = _kernel.jacobi_eigh(h)
    order = np.argsort(w, kind="stable")
    w = w[order]
    v = np.ascontiguousarray(v[:, order])
    _cluster_orthonormalize(w, v, fro)
    return EigDecomposition(w, v)


def expm_apply(m, t: float, vec: np.ndarray) -> np.ndarray:
    """exp(-i t M) vec for Hermitian M."""
    return hermitian_eig(m).expm_apply(t, vec)
