"""Krylov decoupling of a tailed graph into a dark block plus a half-chain.

Running Lanczos tridiagonalization from the tail-attachment vertex splits the
base adjacency into two invariant pieces: the Krylov (reachable) space, on
which the operator is a finite Jacobi matrix that extends through the tail
into an eventually-free half-chain, and the dark complement, which the tail
never sees.  States supported on the dark block are perfectly protected: they
evolve as if the tail were absent.

The Jacobi prefix is stored in reversed Krylov order so that the attachment
vertex occupies the last prefix slot, adjacent to the first tail site; the
full one-sided operator is then

    [ prefix diag | prefix offdiag .. tail_coupling | 0 diag, unit offdiag .. ]
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import Graph, Tail, TailedGraph
from .linalg import hermitian_eig
from .partitions import Partition, quotient_graph

__all__ = [
    "JacobiPrefix",
    "DecoupledForm",
    "lanczos",
    "decouple",
    "reduce_multitail",
    "verify_decoupling",
    "truncated_operator",
]

_BREAKDOWN_REL = 1e-12
_DARK_KEEP = 1e-8


@dataclass(frozen=True)
class JacobiPrefix:
    """Leading diagonal/off-diagonal of the half-chain, plus tail coupling."""

    diag: tuple
    offdiag: tuple
    tail_coupling: float

    def __post_init__(self):
        if len(self.offdiag) != max(len(self.diag) - 1, 0):
            raise ValueError("offdiag length must be len(diag) - 1")

    def extended(self, L: int) -> np.ndarray:
        """Dense (m+L) Jacobi matrix: prefix, coupling, then L free sites."""
        m = len(self.diag)
        size = m + L
        j = np.zeros((size, size))
        for i, d in enumerate(self.diag):
            j[i, i] = d
        for i, b in enumerate(self.offdiag):
            j[i, i + 1] = j[i + 1, i] = b
        if L > 0:
            j[m - 1, m] = j[m, m - 1] = self.tail_coupling
            for i in range(m, size - 1):
                j[i, i + 1] = j[i + 1, i] = 1.0
        return j


@dataclass(frozen=True, eq=False)
class DecoupledForm:
    """Orthonormal split of the base space into reachable + dark parts.

    ``krylov_basis`` columns are ordered so the attachment vertex indicator is
    the last column (matching the reversed Jacobi prefix); ``dark_basis``
    spans the complement, and ``dark_block`` is the restriction of the base
    adjacency to it.
    """

    krylov_basis: np.ndarray
    dark_basis: np.ndarray
    dark_block: np.ndarray
    jacobi: JacobiPrefix

    @property
    def dark_dimension(self) -> int:
        return self.dark_basis.shape[1]


def lanczos(a: np.ndarray, start: np.ndarray):
    """Hermitian Lanczos with full two-pass reorthogonalization.

    Returns (Q, diag, offdiag) where Q's columns are the Krylov basis in
    natural order (Q[:,0] is the normalized start vector) and the tridiagonal
    restriction has the given coefficients.  Stops at breakdown: residual
    norm below 1e-12 relative to the Frobenius norm of ``a``.
    """
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    v = np.asarray(start, dtype=np.complex128)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise ValueError("start vector must be nonzero")
    scale = max(float(np.linalg.norm(a)), 1e-300)
    q = np.zeros((n, n), dtype=np.complex128)
    q[:, 0] = v / nrm
    alphas = []
    betas = []
    for j in range(n):
        w = a @ q[:, j]
        alpha = float(np.real(np.vdot(q[:, j], w)))
        alphas.append(alpha)
        w = w - alpha * q[:, j]
        if j > 0:
            w = w - betas[-1] * q[:, j - 1]
        for _ in range(2):  # full reorthogonalization, two passes
            w = w - q[:, : j + 1] @ (q[:, : j + 1].conj().T @ w)
        beta = float(np.linalg.norm(w))
        if beta < _BREAKDOWN_REL * scale or j == n - 1:
            return q[:, : j + 1].copy(), tuple(alphas), tuple(betas)
        betas.append(beta)
        q[:, j + 1] = w / beta
    return q, tuple(alphas), tuple(betas)


def _dark_completion(krylov: np.ndarray) -> np.ndarray:
    """Orthonormal complement from standard basis vectors in index order."""
    n, m = krylov.shape
    dark = np.zeros((n, n - m), dtype=np.complex128)
    count = 0
    for i in range(n):
        if count == n - m:
            break
        r = np.zeros(n, dtype=np.complex128)
        r[i] = 1.0
        for _ in range(2):
            r = r - krylov @ (krylov.conj().T @ r)
            if count:
                r = r - dark[:, :count] @ (dark[:, :count].conj().T @ r)
        nrm = np.linalg.norm(r)
        if nrm > _DARK_KEEP:
            dark[:, count] = r / nrm
            count += 1
    if count != n - m:
        raise RuntimeError("dark completion failed to reach full dimension")
    return dark


def decouple(t: TailedGraph) -> DecoupledForm:
    """Decouple a single-tail graph; deterministic for fixed input."""
    if len(t.tails) != 1:
        raise ValueError(
            f"decouple requires exactly one tail, got {len(t.tails)} "
            "(reduce_multitail can merge symmetric tails first)")
    tail = t.tails[0]
    a = t.base.adjacency()
    e = np.zeros(t.base.n, dtype=np.complex128)
    e[tail.vertex] = 1.0
    q, diag, off = lanczos(a, e)
    krylov = np.ascontiguousarray(q[:, ::-1])  # attachment vertex last
    dark = _dark_completion(krylov)
    dark_block = dark.conj().T @ a @ dark
    prefix = JacobiPrefix(tuple(reversed(diag)), tuple(reversed(off)),
                          float(tail.weight))
    return DecoupledForm(krylov, dark, dark_block, prefix)


def reduce_multitail(t: TailedGraph) -> TailedGraph:
    """Merge m symmetric tails into one through the equitable quotient.

    Requires all tails to have equal weight and distinct attachment vertices,
    and the attachment set to be a cell of an equitable partition whose other
    cells are singletons.  In the quotient the merged attachment cell becomes
    a single base vertex (its edges scaled by sqrt of the cell size) carrying
    one tail with the original coupling weight.
    """
    if not t.tails:
        raise ValueError("no tails to reduce")
    weights = {tail.weight for tail in t.tails}
    if len(weights) != 1:
        raise ValueError("tails must share one coupling weight to be merged")
    attach = sorted(tail.vertex for tail in t.tails)
    if len(set(attach)) != len(attach):
        raise ValueError("tail attachment vertices must be distinct")
    cells = []
    emitted = False
    aset = set(attach)
    for v_ in range(t.base.n):
        if v_ in aset:
            if not emitted:
                cells.append(tuple(attach))
                emitted = True
        else:
            cells.append((v_,))
    part = Partition(tuple(cells))
    reduced = quotient_graph(t.base, part)  # raises NotEquitable if unfit
    merged_cell = cells.index(tuple(attach))
    return TailedGraph(reduced, (Tail(merged_cell, t.tails[0].weight),))


def truncated_operator(t: TailedGraph, L: int) -> np.ndarray:
    """Dense Hermitian operator with each tail realized as an L-site path.

    Ordering: base vertices 0..n-1, then tail 0's sites, tail 1's sites, ...
    """
    if L < 0:
        raise ValueError("truncation length must be nonnegative")
    n = t.base.n
    size = n + L * len(t.tails)
    m = np.zeros((size, size), dtype=np.complex128)
    m[:n, :n] = t.base.adjacency()
    for k, tail in enumerate(t.tails):
        off = n + k * L
        if L == 0:
            continue
        m[tail.vertex, off] = tail.weight
        m[off, tail.vertex] = tail.weight
        for i in range(L - 1):
            m[off + i, off + i + 1] = 1.0
            m[off + i + 1, off + i] = 1.0
    return m


def verify_decoupling(t: TailedGraph, form: DecoupledForm, L: int) -> float:
    """Frobenius norm of the defect between the conjugated truncated operator
    and the ideal block-diagonal (dark block + extended Jacobi chain)."""
    if len(t.tails) != 1:
        raise ValueError("verification requires a single-tail graph")
    n = t.base.n
    mk = form.krylov_basis.shape[1]
    md = form.dark_basis.shape[1]
    mtrunc = truncated_operator(t, L)
    basis = np.zeros((n + L, md + mk + L), dtype=np.complex128)
    basis[:n, :md] = form.dark_basis
    basis[:n, md:md + mk] = form.krylov_basis
    basis[n:, md + mk:] = np.eye(L)
    conj = basis.conj().T @ mtrunc @ basis
    ideal = np.zeros_like(conj)
    ideal[:md, :md] = form.dark_block
    ideal[md:, md:] = form.jacobi.extended(L)
    return float(np.linalg.norm(conj - ideal))


def dark_eigenvalues(form: DecoupledForm) -> np.ndarray:
    """Ascending eigenvalues of the dark block."""
    return hermitian_eig(form.dark_block).eigenvalues
