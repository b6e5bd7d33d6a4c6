"""Subset-lattice ladder operators and chain decompositions of hypercube
walks.

On the subset lattice of {1..n} (bitmask m, element j on bit j-1), the
lowering operator adds one element, the raising operator removes one, and
their commutator is diagonal with entry n - 2|S| on weight-|S| subsets — the
weight being lowered/raised is this diagonal value, not the subset size.  The
hypercube adjacency is lowering + raising, so the lattice splits into chains
on which the walk acts as a Krawtchouk chain of matching length.

Chains are extracted by highest weight: within each subset-size level k, the
kernel of the raising restriction holds the new chain tops, and repeated
lowering generates the rest.  The kernel basis comes from Gaussian
elimination with partial pivoting followed by Gram-Schmidt, which makes the
decomposition deterministic even when chain lengths repeat.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "LatticeOperator",
    "WalkModule",
    "lowering",
    "raising",
    "h_op",
    "zeta_state",
    "decompose_cube",
    "clebsch_gordan_square",
    "dark_modules_of_tailed_cube",
]

_MAX_N = 16
_MAX_DENSE_N = 12
_CHAIN_STOP = 1e-8


def _check_n(n: int):
    if not (1 <= n <= _MAX_N):
        raise ValueError(f"n must be between 1 and {_MAX_N}, got {n}")


@lru_cache(maxsize=None)
def _popcounts(n: int) -> np.ndarray:
    return np.array([bin(m).count("1") for m in range(1 << n)], dtype=np.int64)


@lru_cache(maxsize=None)
def _levels(n: int) -> tuple:
    """Index arrays of the weight-k subsets, k = 0..n, ascending bitmask."""
    pc = _popcounts(n)
    return tuple(np.flatnonzero(pc == k) for k in range(n + 1))


@dataclass(frozen=True, eq=False)
class LatticeOperator:
    """Ladder operator on the 2**n subset-lattice space.

    kind "lowering" adds one element to each subset, "raising" removes one,
    "cartan" multiplies weight-k subsets by n - 2k.
    """

    n: int
    kind: str

    def __post_init__(self):
        _check_n(self.n)
        if self.kind not in ("lowering", "raising", "cartan"):
            raise ValueError(f"unknown operator kind {self.kind!r}")

    @property
    def dim(self) -> int:
        return 1 << self.n

    def apply(self, vec) -> np.ndarray:
        v = np.asarray(vec)
        if v.shape != (self.dim,):
            raise ValueError(f"vector must have length {self.dim}")
        out = np.zeros(self.dim, dtype=np.result_type(v.dtype, np.float64))
        if self.kind == "cartan":
            out += (self.n - 2 * _popcounts(self.n)) * v
            return out
        all_idx = np.arange(self.dim)
        for j in range(self.n):
            bit = 1 << j
            without = all_idx[(all_idx & bit) == 0]
            if self.kind == "lowering":
                out[without | bit] += v[without]
            else:
                out[without] += v[without | bit]
        return out

    def dense(self) -> np.ndarray:
        """Integer matrix form; kept exact so commutator identities are too."""
        if self.n > _MAX_DENSE_N:
            raise ValueError(
                f"dense form limited to n <= {_MAX_DENSE_N}, got {self.n}")
        d = self.dim
        mat = np.zeros((d, d), dtype=np.int64)
        if self.kind == "cartan":
            np.fill_diagonal(mat, self.n - 2 * _popcounts(self.n))
            return mat
        all_idx = np.arange(d)
        for j in range(self.n):
            bit = 1 << j
            without = all_idx[(all_idx & bit) == 0]
            if self.kind == "lowering":
                mat[without | bit, without] = 1
            else:
                mat[without, without | bit] = 1
        return mat


def lowering(n: int) -> LatticeOperator:
    return LatticeOperator(n, "lowering")


def raising(n: int) -> LatticeOperator:
    return LatticeOperator(n, "raising")


def h_op(n: int) -> LatticeOperator:
    return LatticeOperator(n, "cartan")


def zeta_state(n: int, k: int) -> np.ndarray:
    """Unit vector on weight-k subsets S with amplitude sum_{j in S} zeta**j,
    zeta = exp(2*pi*i/n); global phase fixed so the first nonzero amplitude
    is positive real."""
    _check_n(n)
    if not (1 <= k <= n - 1):
        raise ValueError(f"k must be between 1 and n-1, got {k}")
    zeta = np.exp(2j * math.pi / n)
    powers = zeta ** np.arange(1, n + 1)
    vec = np.zeros(1 << n, dtype=np.complex128)
    for s in _levels(n)[k]:
        amp = 0j
        for j in range(n):
            if s & (1 << j):
                amp += powers[j]
        vec[s] = amp
    vec /= np.linalg.norm(vec)
    first = vec[np.flatnonzero(np.abs(vec) > 1e-12)[0]]
    vec *= np.conj(first) / abs(first)
    return vec


@dataclass(frozen=True, eq=False)
class WalkModule:
    """An orthonormal chain basis spanning an adjacency-invariant subspace.

    Columns of ``basis`` are the chain vectors top-down; the adjacency
    restricted to them is tridiagonal.  The primary module is the one
    containing the all-zeros subset (it alone couples to an attached tail).
    """

    basis: np.ndarray
    chain_length: int
    start_level: int
    is_primary: bool

    def restriction(self, matrix) -> np.ndarray:
        return self.basis.conj().T @ np.asarray(matrix) @ self.basis

    def endpoints(self) -> tuple:
        return self.basis[:, 0].copy(), self.basis[:, -1].copy()

    def to_json_dict(self) -> dict:
        return {
            "chain_length": self.chain_length,
            "start_level": self.start_level,
            "is_primary": self.is_primary,
            "basis": [
                [[float(z.real), float(z.imag)] for z in self.basis[:, j]]
                for j in range(self.basis.shape[1])
            ],
        }


def _kernel_basis(mat: np.ndarray) -> list:
    """Orthonormal kernel basis, deterministically ordered.

    Row-reduce with partial pivoting, read one kernel vector per free column
    (ascending), then Gram-Schmidt in that order.
    """
    a = np.array(mat, dtype=float)
    rows, cols = a.shape
    scale = max(1.0, float(np.max(np.abs(a))) if a.size else 0.0)
    tol = 1e-9 * scale
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        p = r + int(np.argmax(np.abs(a[r:, c])))
        if abs(a[p, c]) <= tol:
            continue
        if p != r:
            a[[r, p]] = a[[p, r]]
        a[r] /= a[r, c]
        others = np.abs(a[:, c]) > 0
        others[r] = False
        a[others] -= np.outer(a[others, c], a[r])
        pivots.append((r, c))
        r += 1
    pivot_cols = {c for _, c in pivots}
    basis = []
    for f in range(cols):
        if f in pivot_cols:
            continue
        v = np.zeros(cols)
        v[f] = 1.0
        for pr, pc in pivots:
            v[pc] = -a[pr, f]
        for b in basis:
            v -= np.dot(b, v) * b
        nrm = float(np.linalg.norm(v))
        if nrm <= 1e-12:
            continue
        basis.append(v / nrm)
    return basis


def _grow_chain(apply_lower, top: np.ndarray, expected: int) -> np.ndarray:
    vecs = [top / np.linalg.norm(top)]
    while True:
        w = apply_lower(vecs[-1])
        nrm = float(np.linalg.norm(w))
        if nrm <= _CHAIN_STOP:
            break
        vecs.append(w / nrm)
    if len(vecs) != expected:
        raise RuntimeError(
            f"chain length {len(vecs)} != expected {expected}")
    return np.column_stack(vecs)


def decompose_cube(n: int) -> list:
    """Chain decomposition of the n-cube walk space.

    One module per highest-weight vector; a chain of length n+1-2k occurs
    with multiplicity C(n,k) - C(n,k-1) starting at subset-size level k.
    """
    _check_n(n)
    if n > _MAX_DENSE_N:
        raise ValueError(
            f"decomposition limited to n <= {_MAX_DENSE_N}, got {n}")
    dim = 1 << n
    levels = _levels(n)
    low = lowering(n)
    modules = []
    for k in range(n // 2 + 1):
        if k == 0:
            kern = [np.array([1.0])]
        else:
            up, here = levels[k - 1], levels[k]
            block = np.zeros((up.size, here.size))
            for jc, s in enumerate(here):
                for jr, b in enumerate(up):
                    if b & ~s == 0:
                        block[jr, jc] = 1.0
            kern = _kernel_basis(block)
        for v in kern:
            top = np.zeros(dim)
            top[levels[k]] = v
            chain = _grow_chain(low.apply, top, n + 1 - 2 * k)
            modules.append(WalkModule(chain.astype(np.complex128),
                                      n + 1 - 2 * k, k, k == 0))
    if sum(m.chain_length for m in modules) != dim:
        raise RuntimeError("chain lengths do not exhaust the lattice space")
    return modules


def clebsch_gordan_square(n: int) -> list:
    """Chain decomposition of the Cartesian square of a length-(n+1)
    Krawtchouk chain: one chain of each length 2n+1, 2n-1, ..., 1."""
    if not (1 <= n <= 10):
        raise ValueError(f"n must be between 1 and 10, got {n}")
    m = n + 1
    b = np.zeros((m, m))
    for k in range(n):
        b[k + 1, k] = math.sqrt((k + 1) * (n - k))
    eye = np.eye(m)
    low2 = np.kron(b, eye) + np.kron(eye, b)
    lvl = (np.arange(m * m) // m) + (np.arange(m * m) % m)
    modules = []
    for ell in range(n + 1):
        here = np.flatnonzero(lvl == ell)
        if ell == 0:
            kern = [np.array([1.0])]
        else:
            up = np.flatnonzero(lvl == ell - 1)
            kern = _kernel_basis(low2[np.ix_(here, up)].T)
        for v in kern:
            top = np.zeros(m * m)
            top[here] = v
            chain = _grow_chain(lambda x: low2 @ x, top, 2 * n + 1 - 2 * ell)
            modules.append(WalkModule(chain.astype(np.complex128),
                                      2 * n + 1 - 2 * ell, ell, ell == 0))
    if sum(mod.chain_length for mod in modules) != m * m:
        raise RuntimeError("chain lengths do not exhaust the square space")
    return modules


def dark_modules_of_tailed_cube(n: int) -> list:
    """Every chain module of the n-cube except the one through the all-zeros
    subset; with a tail attached there, each survives as an invariant block
    of the full operator."""
    if n < 2:
        raise ValueError("need n >= 2 for a nonempty dark space")
    return [m for m in decompose_cube(n) if not m.is_primary]
