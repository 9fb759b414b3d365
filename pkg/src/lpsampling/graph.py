"""Undirected simple graphs, edge-list ingestion and basic network statistics."""

from __future__ import annotations

import io
import logging
import os
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np
import scipy.sparse as sp

from .rng import make_rng

log = logging.getLogger(__name__)

__all__ = [
    "Graph",
    "GraphStats",
    "LoadReport",
    "EdgeListError",
    "EmptyGraphError",
    "parse_edge_list",
    "load_edge_list",
    "giant_component",
    "is_connected",
    "stats",
    "edge_popularity",
    "common_neighbors_count",
    "generate_synthetic",
]


class EdgeListError(ValueError):
    """Raised when an edge list cannot be parsed."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class EmptyGraphError(EdgeListError):
    """Raised when an edge list yields no edges."""


def canonical(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


class Graph:
    """Immutable undirected simple graph over node ids ``0 .. n-1``.

    Neighborhoods are held twice: as sorted tuples (deterministic iteration
    order for the samplers) and as frozensets (fast intersections for the
    similarity indices).

    Parameters
    ----------
    node_count : int
        Number of nodes. Nodes without edges are allowed.
    edges : iterable of (int, int)
        Undirected edges. Duplicates and reversed duplicates are merged,
        self-loops are dropped.
    labels : sequence of str, optional
        Original node labels, indexed by node id.
    """

    __slots__ = ("_n", "_nbrs", "_sets", "_edges", "_labels", "_csr")

    def __init__(self, node_count: int, edges: Iterable[tuple[int, int]],
                 labels: Sequence[str] | None = None):
        if node_count < 0:
            raise ValueError("node_count must be non-negative")
        n = int(node_count)
        adj: list[set[int]] = [set() for _ in range(n)]
        for i, j in edges:
            i, j = int(i), int(j)
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) out of range for {n} nodes")
            if i == j:
                continue
            adj[i].add(j)
            adj[j].add(i)
        self._n = n
        self._nbrs = tuple(tuple(sorted(a)) for a in adj)
        self._sets = tuple(frozenset(a) for a in adj)
        self._edges = tuple((i, j) for i in range(n) for j in self._nbrs[i] if i < j)
        if labels is not None and len(labels) != n:
            raise ValueError("labels must have one entry per node")
        self._labels = tuple(labels) if labels is not None else None
        self._csr = None

    def __repr__(self) -> str:
        return f"Graph(nodes={self._n}, edges={len(self._edges)})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._n == other._n and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self._n, self._edges))

    @property
    def node_count(self) -> int:
        return self._n

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    @property
    def labels(self) -> tuple[str, ...]:
        """Original node labels (defaults to the id as a string)."""
        if self._labels is None:
            return tuple(str(i) for i in range(self._n))
        return self._labels

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        """Edges as ``(i, j)`` with ``i < j``, sorted lexicographically."""
        return self._edges

    @property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        return self._sets

    def _check(self, i: int) -> None:
        if not 0 <= i < self._n:
            raise KeyError(f"unknown node id {i}")

    def neighbors(self, i: int) -> tuple[int, ...]:
        """Sorted neighbors of ``i``."""
        self._check(i)
        return self._nbrs[i]

    def neighbor_set(self, i: int) -> frozenset[int]:
        self._check(i)
        return self._sets[i]

    def degree(self, i: int) -> int:
        self._check(i)
        return len(self._nbrs[i])

    def degrees(self) -> np.ndarray:
        return np.fromiter((len(a) for a in self._nbrs), dtype=np.int64, count=self._n)

    def has_edge(self, i: int, j: int) -> bool:
        return 0 <= i < self._n and j in self._sets[i]

    def edge_array(self) -> np.ndarray:
        """Edges as an ``(|E|, 2)`` int64 array, rows ``(i, j)`` with ``i < j``."""
        if not self._edges:
            return np.empty((0, 2), dtype=np.int64)
        return np.asarray(self._edges, dtype=np.int64)

    def csr(self) -> sp.csr_matrix:
        """Symmetric 0/1 adjacency matrix (cached)."""
        if self._csr is None:
            e = self.edge_array()
            rows = np.concatenate([e[:, 0], e[:, 1]])
            cols = np.concatenate([e[:, 1], e[:, 0]])
            data = np.ones(len(rows), dtype=np.float64)
            m = sp.csr_matrix((data, (rows, cols)), shape=(self._n, self._n))
            m.sort_indices()
            self._csr = m
        return self._csr

    def edge_subgraph(self, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Graph on the same node set keeping only ``edges``."""
        return Graph(self._n, edges, labels=self._labels)

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Return the graph with node ``i`` renamed to ``perm[i]``."""
        labels = None
        if self._labels is not None:
            labels = [""] * self._n
            for i, p in enumerate(perm):
                labels[p] = self._labels[i]
        return Graph(self._n, ((perm[i], perm[j]) for i, j in self._edges), labels=labels)


@dataclass(frozen=True)
class GraphStats:
    node_count: int
    edge_count: int
    avg_degree: float
    clustering: float
    heterogeneity: float


@dataclass(frozen=True)
class LoadReport:
    """Diagnostics collected while parsing an edge list."""

    lines: int
    edges: int
    duplicates: int
    self_loops: int
    comments: int


def _open_text(source) -> tuple[TextIO, bool]:
    if isinstance(source, (str, os.PathLike)):
        return open(source, "r", encoding="utf-8"), True
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(source.decode("utf-8")), True
    return source, False


def parse_edge_list(source, comment: str | Sequence[str] = ("#", "%"),
                    separator: str | None = None,
                    one_indexed: bool = False) -> tuple[Graph, LoadReport]:
    """Parse an edge list and return the graph together with load diagnostics.

    Parameters
    ----------
    source : path or text stream
        One edge per line; the first two tokens of each line are node
        tokens and any further columns (weights, timestamps) are ignored.
    comment : str or sequence of str
        Line prefixes marking comments.
    separator : str, optional
        Token separator; whitespace when ``None``.
    one_indexed : bool
        Tokens are positive integers used as ids directly (``id = token - 1``).
        Otherwise tokens are arbitrary strings compacted to ids in order of
        first appearance.
    """
    prefixes = (comment,) if isinstance(comment, str) else tuple(comment)
    stream, close = _open_text(source)
    ids: dict[str, int] = {}
    labels: list[str] = []
    edges: set[tuple[int, int]] = set()
    n_lines = n_dup = n_loops = n_comments = 0
    max_id = -1

    def node(tok: str, lineno: int) -> int:
        nonlocal max_id
        if one_indexed:
            try:
                v = int(tok) - 1
            except ValueError:
                raise EdgeListError(f"non-integer node token {tok!r}", lineno) from None
            if v < 0:
                raise EdgeListError(f"node token {tok!r} is not one-indexed", lineno)
            max_id = max(max_id, v)
            return v
        v = ids.get(tok)
        if v is None:
            v = ids[tok] = len(labels)
            labels.append(tok)
        return v

    try:
        for lineno, raw in enumerate(stream, start=1):
            line = raw.strip()
            if not line:
                continue
            if prefixes and line.startswith(prefixes):
                n_comments += 1
                continue
            n_lines += 1
            toks = [t for t in line.split(separator) if t.strip()] if separator else line.split()
            if len(toks) < 2:
                raise EdgeListError(f"expected two node tokens, got {line!r}", lineno)
            i, j = node(toks[0].strip(), lineno), node(toks[1].strip(), lineno)
            if i == j:
                n_loops += 1
                continue
            e = canonical(i, j)
            if e in edges:
                n_dup += 1
            else:
                edges.add(e)
    finally:
        if close:
            stream.close()

    if not edges:
        raise EmptyGraphError("edge list contains no edges")
    if one_indexed:
        n = max_id + 1
        labels = [str(v + 1) for v in range(n)]
    else:
        n = len(labels)
    report = LoadReport(lines=n_lines, edges=len(edges), duplicates=n_dup,
                        self_loops=n_loops, comments=n_comments)
    if n_dup or n_loops:
        log.info("merged %d duplicate edges, dropped %d self-loops", n_dup, n_loops)
    return Graph(n, sorted(edges), labels=labels), report


def load_edge_list(source, comment: str | Sequence[str] = ("#", "%"),
                   separator: str | None = None, one_indexed: bool = False) -> Graph:
    """Read an undirected simple graph from an edge list (see `parse_edge_list`)."""
    return parse_edge_list(source, comment=comment, separator=separator,
                           one_indexed=one_indexed)[0]


def _components(graph: Graph) -> list[list[int]]:
    seen = [False] * graph.node_count
    comps = []
    for s in range(graph.node_count):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in graph.neighbors(u):
                if not seen[v]:
                    seen[v] = True
                    comp.append(v)
                    queue.append(v)
        comps.append(comp)
    return comps


def is_connected(graph: Graph) -> bool:
    return graph.node_count > 0 and len(_components(graph)) == 1


def giant_component(graph: Graph) -> Graph:
    """Largest connected component with node ids re-compacted.

    Ties on size go to the component holding the smallest node id. Nodes keep
    their relative order and labels.
    """
    if graph.node_count == 0:
        raise ValueError("graph is empty")
    # components come out ordered by their smallest node id, so max() keeps the first
    best = max(_components(graph), key=len)
    keep = sorted(best)
    remap = {old: new for new, old in enumerate(keep)}
    labels = graph.labels
    edges = [(remap[i], remap[j]) for i, j in graph.edges if i in remap]
    return Graph(len(keep), edges, labels=[labels[i] for i in keep])


def _triangles(graph: Graph) -> np.ndarray:
    a = graph.csr()
    return np.asarray((a @ a).multiply(a).sum(axis=1)).ravel() / 2.0


def stats(graph: Graph) -> GraphStats:
    """Average degree, mean clustering coefficient and degree heterogeneity.

    Nodes with degree below 2 contribute a clustering coefficient of 0.
    """
    n = graph.node_count
    if n < 1:
        raise ValueError("stats needs at least one node")
    k = graph.degrees().astype(np.float64)
    m = graph.edge_count
    avg = 2.0 * m / n
    tri = _triangles(graph)
    denom = k * (k - 1)
    ci = np.zeros(n)
    ok = denom > 0
    ci[ok] = 2.0 * tri[ok] / denom[ok]
    mean_k = k.mean()
    het = float((k ** 2).mean() / mean_k ** 2) if mean_k > 0 else float("nan")
    return GraphStats(node_count=n, edge_count=m, avg_degree=avg,
                      clustering=float(ci.mean()), heterogeneity=het)


def edge_popularity(graph: Graph, i: int, j: int) -> int:
    """``(k_i - 1)(k_j - 1)``; ``(i, j)`` does not have to be an edge.

    A factor for an isolated node is taken as 0 rather than -1, so the
    result is never negative.
    """
    return max(graph.degree(i) - 1, 0) * max(graph.degree(j) - 1, 0)


def common_neighbors_count(graph: Graph, i: int, j: int) -> int:
    return len(graph.neighbor_set(i) & graph.neighbor_set(j))


# --- synthetic generators -------------------------------------------------

def _random_uniform(n: int, m: int, rng) -> list[tuple[int, int]]:
    total = n * (n - 1) // 2
    if m > total:
        raise ValueError(f"cannot place {m} edges on {n} nodes (max {total})")
    if total <= 4_000_000:
        iu, ju = np.triu_indices(n, k=1)
        pick = np.sort(rng.choice(total, size=m, replace=False))
        return list(zip(iu[pick].tolist(), ju[pick].tolist()))
    chosen: set[tuple[int, int]] = set()
    order: list[tuple[int, int]] = []
    while len(chosen) < m:
        for i, j in rng.integers(n, size=(2 * (m - len(chosen)) + 16, 2)).tolist():
            if i != j and len(chosen) < m:
                e = canonical(i, j)
                if e not in chosen:
                    chosen.add(e)
                    order.append(e)
    return order


def _preferential_attachment(n: int, m: int, triad_p: float, rng) -> list[tuple[int, int]]:
    """Barabasi-Albert growth with optional Holme-Kim triad formation steps."""
    if m < 1 or n <= m:
        raise ValueError(f"preferential attachment needs 1 <= m < n (got m={m}, n={n})")
    if not 0.0 <= triad_p <= 1.0:
        raise ValueError("triad_p must lie in [0, 1]")
    adj: list[set[int]] = [set() for _ in range(n)]
    # degree-weighted urn: every edge endpoint appears once
    urn: list[int] = []
    edges: list[tuple[int, int]] = []

    def link(u: int, v: int) -> None:
        adj[u].add(v)
        adj[v].add(u)
        urn.extend((u, v))
        edges.append(canonical(u, v))

    # seed: star on the first m + 1 nodes keeps the graph connected
    for v in range(1, m + 1):
        link(0, v)
    for new in range(m + 1, n):
        chosen: set[int] = set()
        last = -1
        while len(chosen) < m:
            if last >= 0 and triad_p > 0 and rng.random() < triad_p:
                cands = sorted(adj[last] - chosen - {new})
                if cands:
                    chosen.add(cands[int(rng.integers(len(cands)))])
                    continue
            t = urn[int(rng.integers(len(urn)))]
            if t in chosen:
                continue
            chosen.add(t)
            last = t
        for t in sorted(chosen):
            link(new, t)
    return edges


def _small_world(n: int, k: int, p: float, rng) -> list[tuple[int, int]]:
    """Watts-Strogatz: ring lattice with ``k`` neighbors per node, each edge
    rewired with probability ``p`` to a uniform endpoint avoiding loops and
    duplicates."""
    if k % 2 or not 2 <= k < n:
        raise ValueError(f"small-world needs an even k with 2 <= k < n (got k={k})")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    adj: list[set[int]] = [set() for _ in range(n)]
    for i in range(n):
        for d in range(1, k // 2 + 1):
            j = (i + d) % n
            adj[i].add(j)
            adj[j].add(i)
    for d in range(1, k // 2 + 1):
        for i in range(n):
            j = (i + d) % n
            if j not in adj[i] or rng.random() >= p:
                continue
            if len(adj[i]) >= n - 1:
                continue
            while True:
                t = int(rng.integers(n))
                if t != i and t not in adj[i]:
                    break
            adj[i].discard(j)
            adj[j].discard(i)
            adj[i].add(t)
            adj[t].add(i)
    return [(i, j) for i in range(n) for j in sorted(adj[i]) if i < j]


def generate_synthetic(kind: str, seed: int = 0, **params) -> Graph:
    """Small synthetic graphs for tests and demos.

    Kinds and their parameters:

    ``random-uniform``            ``n``, ``m`` -- uniform among graphs with m edges
    ``preferential-attachment``   ``n``, ``m=3``, ``triad_p=0.0`` -- BA growth;
                                  ``triad_p > 0`` adds triadic closure
    ``small-world``               ``n``, ``k``, ``p`` -- Watts-Strogatz rewiring
    ``ring``                      ``n``
    ``complete``                  ``n``
    """
    n = int(params.get("n", 0))
    if n < 1:
        raise ValueError("n must be positive")
    if kind == "complete":
        edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    elif kind == "ring":
        if n < 3:
            raise ValueError("ring needs n >= 3")
        edges = [(i, (i + 1) % n) for i in range(n)]
    elif kind == "small-world":
        edges = _small_world(n, int(params["k"]), float(params["p"]), make_rng(seed))
    elif kind == "random-uniform":
        edges = _random_uniform(n, int(params["m"]), make_rng(seed))
    elif kind == "preferential-attachment":
        edges = _preferential_attachment(n, int(params.get("m", 3)),
                                         float(params.get("triad_p", 0.0)), make_rng(seed))
    else:
        raise ValueError(f"unknown synthetic graph kind {kind!r}")
    return Graph(n, edges)
