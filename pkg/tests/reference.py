"""Independent reference computations used as test oracles.

Everything here is built directly on numpy/scipy primitives
(numpy.linalg.eigh, scipy.linalg.expm) so the package's hand-rolled
eigensolver and propagation code are checked against a second,
independently-written route.
"""
import numpy as np


def dense_tailed(base: np.ndarray, tails, L: int) -> np.ndarray:
    """Base adjacency plus one length-L path per (vertex, weight) tail,
    tail runs appended in order after the base block."""
    n = base.shape[0]
    m = len(tails)
    full = np.zeros((n + m * L, n + m * L), dtype=np.complex128)
    full[:n, :n] = base
    for k, (v, w) in enumerate(tails):
        off = n + k * L
        if L == 0:
            continue
        full[v, off] = w
        full[off, v] = w
        for i in range(L - 1):
            full[off + i, off + i + 1] = 1.0
            full[off + i + 1, off + i] = 1.0
    return full


def eigh_amplitudes(matrix: np.ndarray, source: np.ndarray,
                    target: np.ndarray, times) -> np.ndarray:
    """<target, exp(-i t M) source> for each t, via numpy.linalg.eigh."""
    lam, vec = np.linalg.eigh(matrix)
    s = vec.conj().T @ source
    t_ = vec.conj().T @ target
    phases = np.exp(-1j * np.outer(np.asarray(times, dtype=float), lam))
    return phases @ (np.conj(t_) * s)


def eigh_propagate(matrix: np.ndarray, source: np.ndarray,
                   t: float) -> np.ndarray:
    lam, vec = np.linalg.eigh(matrix)
    return vec @ (np.exp(-1j * lam * t) * (vec.conj().T @ source))


def expm_propagate(matrix: np.ndarray, source: np.ndarray,
                   t: float) -> np.ndarray:
    """Dense scaling-and-squaring matrix exponential route."""
    from scipy.linalg import expm
    return expm(-1j * t * np.asarray(matrix, dtype=np.complex128)) @ source


def random_hermitian(n: int, seed: int, complex_entries=True) -> np.ndarray:
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n))
    if complex_entries:
        a = a + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2


def walk_matrix_rank_by_spectrum(adjacency: np.ndarray, v: int) -> int:
    """Number of eigenvalue clusters whose eigenspace sees e_v."""
    lam, vec = np.linalg.eigh(adjacency)
    e = np.zeros(adjacency.shape[0])
    e[v] = 1.0
    count = 0
    start = 0
    for i in range(1, len(lam) + 1):
        if i == len(lam) or lam[i] - lam[i - 1] > 1e-8:
            if np.linalg.norm(vec[:, start:i].conj().T @ e) > 1e-8:
                count += 1
            start = i
    return count
