"""Weighted Hermitian graphs and the composite constructions used by the walk
machinery.

A :class:`Graph` is a finite vertex set {0, .., n-1} with a Hermitian weight
matrix described by its upper triangle: each stored edge ``(u, v, w)`` with
``u < v`` contributes ``A[u][v] = w`` and ``A[v][u] = conj(w)``.  Diagonal
entries are always zero.  A :class:`TailedGraph` is a graph together with a
list of semi-infinite path tails; each tail hangs off a base vertex with a
real coupling weight, and every interior tail edge has weight 1.

Construction helpers return new immutable values; vertex id conventions are
documented per constructor so that composite graphs are reproducible.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "Graph",
    "Tail",
    "TailedGraph",
    "RootedPiece",
    "TAIL",
    "complete",
    "path",
    "empty_graph",
    "hypercube",
    "krawtchouk_chain",
    "oriented_clique3",
    "join",
    "cone",
    "mcone",
    "cartesian",
    "one_sum",
    "rooted_product",
    "rooted_product_vertex_maps",
    "series_graph",
    "attach_tail",
    "graph_to_json",
    "graph_from_json",
]

_MAX_HYPERCUBE = 20


def _canonical_edges(n: int, entries: Mapping[tuple[int, int], complex]) -> tuple:
    """Validate and sort an edge map into the canonical stored form."""
    seen = {}
    for (u, v), w in entries.items():
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u},{v}) outside vertex range 0..{n - 1}")
        if u == v:
            raise ValueError(f"loop edge at vertex {u} not allowed")
        if u > v:
            u, v, w = v, u, complex(w).conjugate()
        w = complex(w)
        if (u, v) in seen:
            raise ValueError(f"duplicate edge ({u},{v})")
        if w != 0:
            seen[(u, v)] = w
    return tuple((u, v, seen[(u, v)]) for (u, v) in sorted(seen))


@dataclass(frozen=True, eq=False)
class Graph:
    """Finite Hermitian-weighted graph on vertices 0..n-1."""

    n: int
    edges: tuple = ()
    labels: tuple | None = None

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        if self.labels is not None and len(self.labels) != self.n:
            raise ValueError("labels length must equal vertex count")

    @classmethod
    def from_edges(cls, n: int, entries: Mapping[tuple[int, int], complex],
                   labels: Sequence[str] | None = None) -> "Graph":
        return cls(n, _canonical_edges(n, entries),
                   tuple(labels) if labels is not None else None)

    def weights(self) -> dict[tuple[int, int], complex]:
        """Upper-triangle edge map (u, v) -> weight with u < v."""
        return {(u, v): w for u, v, w in self.edges}

    def weight(self, u: int, v: int) -> complex:
        """Hermitian matrix entry A[u][v] (zero if not adjacent)."""
        if u == v:
            return 0j
        key = (u, v) if u < v else (v, u)
        for a, b, w in self.edges:
            if (a, b) == key:
                return w if u < v else w.conjugate()
        return 0j

    def adjacency(self) -> np.ndarray:
        """Dense Hermitian adjacency matrix (complex128)."""
        a = np.zeros((self.n, self.n), dtype=np.complex128)
        for u, v, w in self.edges:
            a[u, v] = w
            a[v, u] = w.conjugate()
        return a

    def degree(self, u: int) -> complex:
        """Sum of weights on edges at u (real for unweighted graphs)."""
        total = 0j
        for a, b, w in self.edges:
            if a == u:
                total += w
            elif b == u:
                total += w.conjugate()
        return total

    def neighbors(self, u: int) -> list[int]:
        out = [b if a == u else a for a, b, _ in self.edges if u in (a, b)]
        return sorted(out)

    def with_edges(self, extra: Mapping[tuple[int, int], complex]) -> "Graph":
        """New graph with additional edges (duplicates rejected)."""
        merged = self.weights()
        for (u, v), w in extra.items():
            key = (u, v) if u < v else (v, u)
            if key in merged:
                raise ValueError(f"edge {key} already present")
            merged[(u, v)] = w
        return Graph.from_edges(self.n, merged, self.labels)

    def relabel(self, labels: Sequence[str] | None) -> "Graph":
        return Graph(self.n, self.edges,
                     tuple(labels) if labels is not None else None)

    def is_real(self) -> bool:
        return all(w.imag == 0 for _, _, w in self.edges)

    def __repr__(self):
        return f"Graph(n={self.n}, edges={len(self.edges)})"


@dataclass(frozen=True)
class Tail:
    """Semi-infinite path tail attached at `vertex` with first-edge `weight`."""

    vertex: int
    weight: float = 1.0

    def __post_init__(self):
        if self.weight <= 0:
            raise ValueError("tail coupling weight must be positive")


@dataclass(frozen=True, eq=False)
class TailedGraph:
    """A finite base graph carrying zero or more path tails."""

    base: Graph
    tails: tuple = ()

    def __post_init__(self):
        for t in self.tails:
            if not (0 <= t.vertex < self.base.n):
                raise ValueError(f"tail vertex {t.vertex} outside base graph")

    @property
    def n(self) -> int:
        return self.base.n

    def __repr__(self):
        at = ",".join(str(t.vertex) for t in self.tails)
        return f"TailedGraph(n={self.base.n}, tails@[{at}])"


class _TailMarker:
    """Sentinel marking a tail slot in rooted products."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "TAIL"


TAIL = _TailMarker()


@dataclass(frozen=True)
class RootedPiece:
    """A graph with a designated root vertex, for rooted products."""

    graph: Graph
    root: int

    def __post_init__(self):
        if not (0 <= self.root < self.graph.n):
            raise ValueError("root outside piece vertex range")


# ---------------------------------------------------------------------------
# elementary families
# ---------------------------------------------------------------------------

def complete(n: int) -> Graph:
    """Complete graph K_n (unit weights)."""
    if n < 1:
        raise ValueError("complete graph needs n >= 1")
    return Graph.from_edges(n, {(u, v): 1.0 for u in range(n) for v in range(u + 1, n)})


def path(n: int) -> Graph:
    """Path P_n on vertices 0..n-1 in line order."""
    if n < 1:
        raise ValueError("path needs n >= 1")
    return Graph.from_edges(n, {(i, i + 1): 1.0 for i in range(n - 1)})


def empty_graph(n: int) -> Graph:
    """Edgeless graph on n vertices."""
    if n < 0:
        raise ValueError("vertex count must be nonnegative")
    return Graph(n)


def hypercube(n: int) -> Graph:
    """n-dimensional hypercube; vertex ids are subset bitmasks 0..2^n-1."""
    if n < 0:
        raise ValueError("hypercube dimension must be >= 0")
    if n > _MAX_HYPERCUBE:
        raise ValueError(f"hypercube dimension {n} exceeds guard {_MAX_HYPERCUBE}")
    edges = {}
    for u in range(1 << n):
        for b in range(n):
            v = u ^ (1 << b)
            if v > u:
                edges[(u, v)] = 1.0
    return Graph.from_edges(1 << n, edges)


def krawtchouk_chain(n: int) -> Graph:
    """Weighted path on n+1 vertices, edge k..k+1 of weight sqrt((k+1)(n-k)).

    This is the Hamming-weight quotient of the n-cube; the two end vertices
    admit perfect state transfer at time pi/2.
    """
    if n < 1:
        raise ValueError("chain parameter must be >= 1")
    return Graph.from_edges(
        n + 1, {(k, k + 1): math.sqrt((k + 1) * (n - k)) for k in range(n)})


def oriented_clique3() -> Graph:
    """Circulation-weighted triangle: each directed edge u->u+1 carries -i."""
    return Graph.from_edges(3, {(0, 1): -1j, (1, 2): -1j, (0, 2): 1j})


# ---------------------------------------------------------------------------
# composite constructions
# ---------------------------------------------------------------------------

def _shifted(entries: Iterable, offset: int) -> dict:
    return {(u + offset, v + offset): w for u, v, w in entries}


def join(g: Graph, h: Graph) -> Graph:
    """Complete join: all of g (ids 0..) to all of h (ids |V(g)|..), weight 1."""
    edges = dict(g.weights())
    edges.update(_shifted(h.edges, g.n))
    for u in range(g.n):
        for v in range(h.n):
            edges[(u, g.n + v)] = 1.0
    return Graph.from_edges(g.n + h.n, edges)


def cone(g: Graph) -> Graph:
    """Join of a single apex vertex (id 0) to g (ids 1..)."""
    return join(empty_graph(1), g)


def mcone(m: int, g: Graph) -> Graph:
    """Join of an m-vertex coclique (ids 0..m-1) to g (ids m..)."""
    if m < 1:
        raise ValueError("multicone needs m >= 1")
    return join(empty_graph(m), g)


def cartesian(g: Graph, h: Graph) -> Graph:
    """Cartesian product; vertex (a, b) gets id a*|V(h)| + b."""
    edges = {}
    for a, b, w in g.edges:
        for k in range(h.n):
            edges[(a * h.n + k, b * h.n + k)] = w
    for a, b, w in h.edges:
        for k in range(g.n):
            edges[(k * h.n + a, k * h.n + b)] = w
    return Graph.from_edges(g.n * h.n, edges)


def one_sum(g: Graph, u: int, h: Graph, v: int) -> Graph:
    """Glue h onto g by identifying h's vertex v with g's vertex u.

    Vertices of g keep their ids; vertices of h other than v are appended in
    ascending original order; the merged vertex keeps id u.
    """
    if not (0 <= u < g.n) or not (0 <= v < h.n):
        raise ValueError("one_sum vertices outside range")
    remap = {}
    nxt = g.n
    for w_ in range(h.n):
        if w_ == v:
            remap[w_] = u
        else:
            remap[w_] = nxt
            nxt += 1
    edges = dict(g.weights())
    for a, b, w in h.edges:
        ra, rb = remap[a], remap[b]
        key = (ra, rb) if ra < rb else (rb, ra)
        wk = w if ra < rb else w.conjugate()
        if key in edges:
            raise ValueError(f"one_sum would duplicate edge {key}")
        edges[key] = wk
    return Graph.from_edges(g.n + h.n - 1, edges)


def rooted_product_vertex_maps(base: Graph, pieces: Sequence) -> list:
    """Per-piece map original-vertex-id -> product-vertex-id.

    Tail slots map to ``None``.  Base vertex i keeps id i and coincides with
    the root of piece i; non-root piece vertices are appended in ascending
    original order, pieces processed in base-vertex order.
    """
    if len(pieces) != base.n:
        raise ValueError("need exactly one piece (or TAIL) per base vertex")
    maps = []
    nxt = base.n
    for i, piece in enumerate(pieces):
        if piece is TAIL:
            maps.append(None)
            continue
        if not isinstance(piece, RootedPiece):
            raise TypeError("pieces must be RootedPiece or TAIL")
        m = {}
        for w_ in range(piece.graph.n):
            if w_ == piece.root:
                m[w_] = i
            else:
                m[w_] = nxt
                nxt += 1
        maps.append(m)
    return maps


def rooted_product(base: Graph, pieces: Sequence) -> TailedGraph:
    """Rooted product: identify base vertex i with the root of piece i.

    A ``TAIL`` entry attaches a unit-weight tail at that base vertex instead
    of a finite piece.  Vertex ids follow :func:`rooted_product_vertex_maps`.
    """
    maps = rooted_product_vertex_maps(base, pieces)
    edges = dict(base.weights())
    total = base.n + sum(p.graph.n - 1 for p in pieces if p is not TAIL)
    tails = []
    for i, piece in enumerate(pieces):
        if piece is TAIL:
            tails.append(Tail(vertex=i, weight=1.0))
            continue
        m = maps[i]
        for a, b, w in piece.graph.edges:
            ra, rb = m[a], m[b]
            key = (ra, rb) if ra < rb else (rb, ra)
            wk = w if ra < rb else w.conjugate()
            if key in edges:
                raise ValueError(f"rooted product would duplicate edge {key}")
            edges[key] = wk
    return TailedGraph(Graph.from_edges(total, edges), tuple(tails))


def series_graph(parts: Sequence[Graph]) -> Graph:
    """Chain of complete joins: consecutive parts fully joined, weight 1.

    Part vertex ids are offset cumulatively in the given order.
    """
    if not parts:
        raise ValueError("series graph needs at least one part")
    edges = {}
    offsets = []
    total = 0
    for p in parts:
        offsets.append(total)
        edges.update(_shifted(p.edges, total))
        total += p.n
    for i in range(len(parts) - 1):
        for u in range(parts[i].n):
            for v in range(parts[i + 1].n):
                edges[(offsets[i] + u, offsets[i + 1] + v)] = 1.0
    return Graph.from_edges(total, edges)


def attach_tail(g, vertex: int, weight: float = 1.0) -> TailedGraph:
    """Attach one path tail; accepts a Graph or an already-tailed graph."""
    if isinstance(g, TailedGraph):
        return TailedGraph(g.base, g.tails + (Tail(vertex, weight),))
    return TailedGraph(g, (Tail(vertex, weight),))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def graph_to_json(g) -> str:
    """Serialize a Graph or TailedGraph to the interchange JSON format."""
    if isinstance(g, Graph):
        base, tails = g, ()
    elif isinstance(g, TailedGraph):
        base, tails = g.base, g.tails
    else:
        raise TypeError("expected Graph or TailedGraph")
    doc = {
        "n": base.n,
        "edges": [[u, v, w.real, w.imag] for u, v, w in base.edges],
    }
    if tails:
        doc["tails"] = [{"vertex": t.vertex, "weight": t.weight} for t in tails]
    if base.labels is not None:
        doc["labels"] = list(base.labels)
    return json.dumps(doc, indent=2, sort_keys=True)


def graph_from_json(text):
    """Parse the interchange format; returns TailedGraph if tails are present."""
    doc = json.loads(text) if isinstance(text, str) else dict(text)
    try:
        n = int(doc["n"])
    except KeyError as exc:
        raise ValueError("graph JSON missing 'n'") from exc
    edges = {}
    for e in doc.get("edges", ()):
        if len(e) == 2:
            u, v, re, im = e[0], e[1], 1.0, 0.0
        elif len(e) == 3:
            u, v, re, im = e[0], e[1], e[2], 0.0
        elif len(e) == 4:
            u, v, re, im = e
        else:
            raise ValueError(f"malformed edge entry {e!r}")
        key = (int(u), int(v))
        if key in edges:
            raise ValueError(f"duplicate edge {key} in JSON")
        edges[key] = complex(float(re), float(im))
    labels = doc.get("labels")
    g = Graph.from_edges(n, edges, labels)
    tails = tuple(Tail(int(t["vertex"]), float(t.get("weight", 1.0)))
                  for t in doc.get("tails", ()))
    if tails:
        return TailedGraph(g, tails)
    return g
