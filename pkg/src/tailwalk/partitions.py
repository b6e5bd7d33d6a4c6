"""Vertex partitions, equitable quotients, and walk-matrix controllability.

An equitable partition groups vertices into cells so that every vertex in a
cell sees the same total edge weight into each cell.  The quotient operator
acts on one coordinate per cell; with the symmetric cell-size scaling used
here (block weight sum divided by sqrt(|V_j||V_k|)) it is again Hermitian and
its spectrum embeds in the full graph's spectrum.

The walk matrix [e_v, A e_v, ..., A^{n-1} e_v] measures how much of the graph
a walk started at v can reach: its rank is the dimension of the Krylov space,
and n - rank is the dimension of the "dark" complement that a tail attached
at v can never see.  For graphs whose weights are Gaussian integers the rank
is computed exactly by fraction-free elimination; otherwise a singular-value
threshold is used.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
import json

import numpy as np

from .graphs import Graph

__all__ = [
    "Partition",
    "QuotientMatrix",
    "WalkMatrixReport",
    "NotEquitable",
    "distance_partition",
    "is_equitable",
    "quotient",
    "quotient_graph",
    "walk_matrix",
    "controllability",
    "random_graph",
    "partition_to_json",
    "partition_from_json",
]


class NotEquitable(ValueError):
    """Raised when an operation requires an equitable partition."""

    def __init__(self, witness):
        self.witness = witness
        vertex, cell = witness
        super().__init__(
            f"partition not equitable: vertex {vertex} has a deviating "
            f"weight sum into cell {cell}")


@dataclass(frozen=True)
class Partition:
    """Ordered partition of 0..n-1 into nonempty cells (each cell sorted)."""

    cells: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "cells", tuple(tuple(sorted(c)) for c in self.cells))
        seen = set()
        for c in self.cells:
            if not c:
                raise ValueError("empty cell")
            for v in c:
                if v in seen:
                    raise ValueError(f"vertex {v} appears in two cells")
                seen.add(v)

    @property
    def n(self) -> int:
        return sum(len(c) for c in self.cells)

    def cell_of(self, v: int) -> int:
        for i, c in enumerate(self.cells):
            if v in c:
                return i
        raise KeyError(v)

    def validate_for(self, g: Graph):
        covered = sorted(v for c in self.cells for v in c)
        if covered != list(range(g.n)):
            raise ValueError("partition does not cover the vertex set exactly")


@dataclass(frozen=True, eq=False)
class QuotientMatrix:
    """Hermitian quotient operator plus the cell sizes it was built from."""

    matrix: np.ndarray
    cell_sizes: tuple


@dataclass(frozen=True)
class WalkMatrixReport:
    """Rank of the walk matrix at a vertex and the dark complement size."""

    rank: int
    dark_dimension: int
    exact: bool

    @property
    def controllable(self) -> bool:
        return self.dark_dimension == 0


def distance_partition(g: Graph, v: int) -> Partition:
    """BFS layers around v; raises if any vertex is unreachable."""
    if not (0 <= v < g.n):
        raise ValueError(f"vertex {v} outside range")
    adj = [[] for _ in range(g.n)]
    for a, b, _ in g.edges:
        adj[a].append(b)
        adj[b].append(a)
    dist = [-1] * g.n
    dist[v] = 0
    q = deque([v])
    while q:
        u = q.popleft()
        for w in adj[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                q.append(w)
    if any(d < 0 for d in dist):
        missing = [u for u, d in enumerate(dist) if d < 0]
        raise ValueError(f"unreachable vertices from {v}: {missing}")
    layers = [[] for _ in range(max(dist) + 1)]
    for u, d in enumerate(dist):
        layers[d].append(u)
    return Partition(tuple(tuple(l) for l in layers))


def _cell_sums(a: np.ndarray, part: Partition) -> np.ndarray:
    """Row sums of A into each cell: shape (n, num_cells)."""
    cols = [a[:, list(c)].sum(axis=1) for c in part.cells]
    return np.stack(cols, axis=1)


def is_equitable(g: Graph, part: Partition, tol: float = 1e-9):
    """Check blockwise-constant row sums; returns (flag, witness).

    The witness names the first (vertex, cell) whose weight sum deviates from
    its cell's reference vertex; it is None when the partition is equitable.
    """
    part.validate_for(g)
    a = g.adjacency()
    scale = max(1.0, float(np.max(np.abs(a))) if g.edges else 1.0)
    sums = _cell_sums(a, part)
    for ci, cell in enumerate(part.cells):
        ref = sums[cell[0]]
        for u in cell[1:]:
            dev = np.abs(sums[u] - ref)
            bad = np.nonzero(dev > tol * scale)[0]
            if bad.size:
                return False, (u, int(bad[0]))
    return True, None


def quotient(g: Graph, part: Partition, tol: float = 1e-9) -> QuotientMatrix:
    """Symmetrically scaled quotient operator; raises NotEquitable."""
    ok, witness = is_equitable(g, part, tol)
    if not ok:
        raise NotEquitable(witness)
    a = g.adjacency()
    m = len(part.cells)
    sizes = np.array([len(c) for c in part.cells], dtype=float)
    q = np.zeros((m, m), dtype=np.complex128)
    for j, cj in enumerate(part.cells):
        for k, ck in enumerate(part.cells):
            block = a[np.ix_(list(cj), list(ck))].sum()
            q[j, k] = block / np.sqrt(sizes[j] * sizes[k])
    return QuotientMatrix(q, tuple(int(s) for s in sizes))


def quotient_graph(g: Graph, part: Partition, tol: float = 1e-9) -> Graph:
    """The quotient operator reinterpreted as a weighted graph on the cells.

    Requires a zero quotient diagonal (no cell is internally regular with
    nonzero weight), since graphs here carry no loops.
    """
    qm = quotient(g, part, tol)
    m = qm.matrix.shape[0]
    dmax = float(np.max(np.abs(np.diag(qm.matrix)))) if m else 0.0
    if dmax > tol:
        raise ValueError("quotient has nonzero diagonal; not a loopless graph")
    edges = {}
    for j in range(m):
        for k in range(j + 1, m):
            w = qm.matrix[j, k]
            if abs(w) > tol:
                edges[(j, k)] = w
    return Graph.from_edges(m, edges)


def walk_matrix(g: Graph, v: int) -> np.ndarray:
    """Columns e_v, A e_v, ..., A^{n-1} e_v."""
    if not (0 <= v < g.n):
        raise ValueError(f"vertex {v} outside range")
    a = g.adjacency()
    cols = np.zeros((g.n, g.n), dtype=np.complex128)
    x = np.zeros(g.n, dtype=np.complex128)
    x[v] = 1.0
    for k in range(g.n):
        cols[:, k] = x
        if k + 1 < g.n:
            x = a @ x
    return cols


# -- exact Gaussian-integer rank ---------------------------------------------

def _gi_mul(x, y):
    a, b = x
    c, d = y
    return (a * c - b * d, a * d + b * c)


def _gi_divexact(x, y):
    a, b = x
    c, d = y
    den = c * c + d * d
    re = a * c + b * d
    im = b * c - a * d
    if re % den or im % den:
        raise ArithmeticError("inexact division in fraction-free elimination")
    return (re // den, im // den)


def _gaussian_integer_matrix(m: np.ndarray):
    """Return the matrix as int pairs, or None if any entry is not one."""
    out = []
    for row in m:
        r = []
        for z in row:
            re, im = float(z.real), float(z.imag)
            if not (re.is_integer() and im.is_integer()):
                return None
            r.append((int(re), int(im)))
        out.append(r)
    return out


def _bareiss_rank(rows) -> int:
    """Fraction-free row echelon rank over the Gaussian integers."""
    m = [list(r) for r in rows]
    nrow = len(m)
    ncol = len(m[0]) if nrow else 0
    rank = 0
    prev = (1, 0)
    col = 0
    while rank < nrow and col < ncol:
        piv_row = next((r for r in range(rank, nrow) if m[r][col] != (0, 0)), None)
        if piv_row is None:
            col += 1
            continue
        m[rank], m[piv_row] = m[piv_row], m[rank]
        piv = m[rank][col]
        for r in range(rank + 1, nrow):
            for c in range(col + 1, ncol):
                num = tuple(p - q for p, q in zip(
                    _gi_mul(piv, m[r][c]), _gi_mul(m[r][col], m[rank][c])))
                m[r][c] = _gi_divexact(num, prev)
            m[r][col] = (0, 0)
        prev = piv
        rank += 1
        col += 1
    return rank


def _gi_matvec(mat, x):
    n = len(x)
    out = []
    for u in range(n):
        sa = sb = 0
        row = mat[u]
        for w in range(n):
            c, d = row[w]
            if c or d:
                a, b = x[w]
                if a or b:
                    sa += a * c - b * d
                    sb += a * d + b * c
        out.append((sa, sb))
    return out


def controllability(g: Graph, v: int) -> WalkMatrixReport:
    """Walk-matrix rank report at v (exact when weights are Gaussian integers)."""
    a = g.adjacency()
    exact_adj = _gaussian_integer_matrix(a)
    if exact_adj is not None:
        n = g.n
        x = [(1, 0) if u == v else (0, 0) for u in range(n)]
        cols = []
        for k in range(n):
            cols.append(list(x))
            if k + 1 < n:
                x = _gi_matvec(exact_adj, x)
        rows = [[cols[k][u] for k in range(n)] for u in range(n)]
        rank = _bareiss_rank(rows)
        return WalkMatrixReport(rank, g.n - rank, exact=True)
    w = walk_matrix(g, v)
    sv = np.linalg.svd(w, compute_uv=False)
    smax = float(sv[0]) if sv.size else 0.0
    rank = int(np.sum(sv > 1e-9 * smax)) if smax > 0 else 0
    return WalkMatrixReport(rank, g.n - rank, exact=False)


def random_graph(n: int, seed: int) -> Graph:
    """Erdos-Renyi G(n, 1/2) drawn from a seeded PCG64 stream.

    Pairs are visited in lexicographic order so the graph is a pure function
    of (n, seed).
    """
    if n < 1:
        raise ValueError("random graph needs n >= 1")
    rng = np.random.default_rng(seed)
    edges = {}
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < 0.5:
                edges[(u, v)] = 1.0
    return Graph.from_edges(n, edges)


def partition_to_json(part: Partition) -> str:
    return json.dumps({"cells": [list(c) for c in part.cells]})


def partition_from_json(text) -> Partition:
    doc = json.loads(text) if isinstance(text, str) else dict(text)
    return Partition(tuple(tuple(int(v) for v in c) for c in doc["cells"]))
