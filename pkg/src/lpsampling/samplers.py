"""Edge samplers that split a graph's edges into a training set and a probe set.

Each sampler collects exactly ``ceil(s_f * |E|)`` distinct edges into the
training set; the remaining edges form the probe set. Edges are added one at
a time, so node-at-a-time procedures (BFS, Forest Fire) may stop halfway
through a node's edge list.
"""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph
from .rng import make_rng

__all__ = [
    "Method",
    "SamplerSpec",
    "Partition",
    "SamplingError",
    "SamplerStalled",
    "target_size",
    "draw_burn_count",
    "sample",
    "sample_bfs",
    "sample_mhrw",
    "sample_fs",
    "sample_ff",
    "sample_pr",
    "walk_trace",
]

STEP_BUDGET = 10_000


class SamplingError(RuntimeError):
    """A sampler could not reach its target size."""


class SamplerStalled(SamplingError):
    """A walk-based sampler exceeded its step budget."""


class Method(str, enum.Enum):
    BFS = "BFS"
    MHRW = "MHRW"
    FS = "FS"
    FF = "FF"
    PR = "PR"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class SamplerSpec:
    """A sampler together with its parameters.

    ``m`` is only used by FS and ``p_f`` only by FF; the others ignore them.
    """

    method: Method
    s_f: float = 0.9
    m: int = 100
    p_f: float = 0.8
    seed: int = 0

    def __post_init__(self):
        method = self.method.upper() if isinstance(self.method, str) else self.method
        object.__setattr__(self, "method", Method(method))
        if not 0.0 < self.s_f <= 1.0:
            raise ValueError(f"s_f must lie in (0, 1], got {self.s_f}")
        if self.method is Method.FS and self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m}")
        if self.method is Method.FF and not 0.0 < self.p_f < 1.0:
            raise ValueError(f"p_f must lie in (0, 1), got {self.p_f}")

    def params(self) -> str:
        """Canonical parameter string, e.g. ``"s_f=0.9;m=100"``."""
        out = f"s_f={self.s_f!r}"
        if self.method is Method.FS:
            out += f";m={self.m}"
        elif self.method is Method.FF:
            out += f";p_f={self.p_f!r}"
        return out

    @property
    def label(self) -> str:
        if self.method is Method.FS:
            return f"FS(m={self.m})"
        if self.method is Method.FF:
            return f"FF(p_f={self.p_f:g})"
        return self.method.value

    def to_dict(self) -> dict:
        d = {"method": self.method.value, "s_f": self.s_f}
        if self.method is Method.FS:
            d["m"] = self.m
        if self.method is Method.FF:
            d["p_f"] = self.p_f
        d["seed"] = self.seed
        return d

    @classmethod
    def from_dict(cls, d) -> "SamplerSpec":
        if isinstance(d, str):
            return cls(Method(d.upper()))
        d = dict(d)
        return cls(Method(str(d.pop("method")).upper()), **d)


@dataclass(frozen=True)
class Partition:
    train: frozenset = field(repr=False)
    probe: frozenset = field(repr=False)

    def __repr__(self) -> str:
        return f"Partition(train={len(self.train)}, probe={len(self.probe)})"

    def train_graph(self, graph: Graph) -> Graph:
        return graph.edge_subgraph(sorted(self.train))

    def probe_array(self) -> np.ndarray:
        if not self.probe:
            return np.empty((0, 2), dtype=np.int64)
        return np.asarray(sorted(self.probe), dtype=np.int64)


def target_size(edge_count: int, s_f: float) -> int:
    """``ceil(s_f * edge_count)``, robust to float noise such as ``0.9 * 10``."""
    if not 0.0 < s_f <= 1.0:
        raise ValueError(f"s_f must lie in (0, 1], got {s_f}")
    x = round(s_f * edge_count, 9)
    if x < 1:
        raise ValueError(f"s_f * |E| = {s_f * edge_count:g} is below one edge")
    return math.ceil(x)


def _finish(graph: Graph, train: set) -> Partition:
    probe = frozenset(e for e in graph.edges if e not in train)
    return Partition(frozenset(train), probe)


def _start_node(graph: Graph, rng, start: int | None) -> int:
    if start is None:
        return int(rng.integers(graph.node_count))
    graph.neighbors(start)  # validates the id
    return int(start)


def sample_bfs(graph: Graph, s_f: float, seed: int, *, start: int | None = None) -> Partition:
    """Breadth-first edge collection from a uniformly random start node.

    Nodes leave the queue in FIFO order; a dequeued node's edges that are not
    yet sampled are added in sorted-neighbor order, and its unvisited
    neighbors are enqueued in that same order.
    """
    target = target_size(graph.edge_count, s_f)
    rng = make_rng(seed)
    s = _start_node(graph, rng, start)
    visited = [False] * graph.node_count
    visited[s] = True
    queue = deque([s])
    train: set[tuple[int, int]] = set()
    while queue:
        i = queue.popleft()
        for j in graph.neighbors(i):
            e = (i, j) if i < j else (j, i)
            if e not in train:
                train.add(e)
                if len(train) == target:
                    return _finish(graph, train)
        for j in graph.neighbors(i):
            if not visited[j]:
                visited[j] = True
                queue.append(j)
    raise SamplingError(
        f"BFS exhausted the start node's component with {len(train)} of {target} edges; "
        "run samplers on the giant component")


def sample_mhrw(graph: Graph, s_f: float, seed: int, *, start: int | None = None,
                max_steps: int | None = None) -> Partition:
    """Metropolis-Hastings random walk targeting the uniform node distribution.

    From node ``i`` a neighbor ``j`` is proposed uniformly and accepted when
    ``u <= min(1, k_i / k_j)``. Accepted moves add the traversed edge;
    rejected proposals keep the walker at ``i``. Only distinct edges count
    toward the target.
    """
    target = target_size(graph.edge_count, s_f)
    rng = make_rng(seed)
    i = _start_node(graph, rng, start)
    budget = STEP_BUDGET * target if max_steps is None else max_steps
    nbrs = [graph.neighbors(v) for v in range(graph.node_count)]
    deg = [len(a) for a in nbrs]
    if deg[i] == 0:
        raise SamplingError(f"start node {i} is isolated")
    train: set[tuple[int, int]] = set()
    size = 8192
    buf = rng.random(size).tolist()
    pos = 0
    for _ in range(budget):
        if pos + 2 > size:
            buf = rng.random(size).tolist()
            pos = 0
        ki = deg[i]
        j = nbrs[i][int(buf[pos] * ki)]
        u = buf[pos + 1]
        pos += 2
        if u <= min(1.0, ki / deg[j]):
            train.add((i, j) if i < j else (j, i))
            if len(train) == target:
                return _finish(graph, train)
            i = j
    raise SamplerStalled(f"MHRW stalled at {len(train)} of {target} edges after {budget} steps")


class _Fenwick:
    """Prefix sums over non-negative integer weights with weighted index search."""

    __slots__ = ("n", "tree", "total", "top")

    def __init__(self, weights: list[int]):
        self.n = len(weights)
        self.tree = [0] * (self.n + 1)
        self.total = 0
        for idx, w in enumerate(weights):
            self.add(idx, w)
        self.top = 1 << (self.n.bit_length() - 1) if self.n else 0

    def add(self, idx: int, delta: int) -> None:
        self.total += delta
        k = idx + 1
        tree = self.tree
        while k <= self.n:
            tree[k] += delta
            k += k & -k

    def find(self, r: int) -> int:
        """Smallest index whose inclusive prefix sum exceeds ``r``."""
        pos = 0
        step = self.top
        tree = self.tree
        while step:
            nxt = pos + step
            if nxt <= self.n and tree[nxt] <= r:
                pos = nxt
                r -= tree[nxt]
            step >>= 1
        return pos


def sample_fs(graph: Graph, s_f: float, m: int, seed: int, *,
              max_steps: int | None = None) -> Partition:
    """Frontier sampling with ``m`` dependent walkers.

    ``m`` distinct start nodes are drawn uniformly. At every step a walker is
    chosen with probability proportional to the degree of its current node,
    moves to a uniform neighbor, and the traversed edge joins the training
    set.
    """
    n = graph.node_count
    if not 1 <= m <= n:
        raise ValueError(f"m must lie in [1, |V|={n}], got {m}")
    target = target_size(graph.edge_count, s_f)
    rng = make_rng(seed)
    walkers = rng.choice(n, size=m, replace=False).tolist()
    nbrs = [graph.neighbors(v) for v in range(n)]
    deg = [len(a) for a in nbrs]
    fen = _Fenwick([deg[v] for v in walkers])
    if fen.total == 0:
        raise SamplingError("all frontier seeds are isolated")
    budget = STEP_BUDGET * target if max_steps is None else max_steps
    train: set[tuple[int, int]] = set()
    size = 8192
    buf = rng.random(size).tolist()
    pos = 0
    for _ in range(budget):
        if pos + 2 > size:
            buf = rng.random(size).tolist()
            pos = 0
        w = fen.find(int(buf[pos] * fen.total))
        i = walkers[w]
        j = nbrs[i][int(buf[pos + 1] * deg[i])]
        pos += 2
        train.add((i, j) if i < j else (j, i))
        if len(train) == target:
            return _finish(graph, train)
        walkers[w] = j
        fen.add(w, deg[j] - deg[i])
    raise SamplerStalled(f"FS stalled at {len(train)} of {target} edges after {budget} steps")


def draw_burn_count(rng: np.random.Generator, p_f: float, size=None):
    """Geometric draws on ``{0, 1, 2, ...}`` with mean ``p_f / (1 - p_f)``.

    Success probability is ``1 - p_f``; NumPy's geometric counts trials
    (support starting at 1), hence the shift.
    """
    return rng.geometric(1.0 - p_f, size=size) - 1


def sample_ff(graph: Graph, s_f: float, p_f: float, seed: int, *,
              start: int | None = None) -> Partition:
    """Forest Fire edge sampling with forward-burning probability ``p_f``.

    Burned nodes contribute all their edges (in sorted-neighbor order, up to
    the target). After burning a node, a geometric number of its neighbors
    that are neither burned nor queued are picked uniformly without
    replacement and queued. When the fire dies out, it is re-ignited at a
    uniformly random unburned node.
    """
    if not 0.0 < p_f < 1.0:
        raise ValueError(f"p_f must lie in (0, 1), got {p_f}")
    target = target_size(graph.edge_count, s_f)
    rng = make_rng(seed)
    n = graph.node_count
    burned = [False] * n
    queued = [False] * n
    s = _start_node(graph, rng, start)
    queued[s] = True
    queue = deque([s])
    train: set[tuple[int, int]] = set()
    while True:
        if not queue:
            fresh = [v for v in range(n) if not burned[v]]
            if not fresh:
                raise SamplingError("every node burned before reaching the target")
            v = fresh[int(rng.integers(len(fresh)))]
            queued[v] = True
            queue.append(v)
        i = queue.popleft()
        burned[i] = True
        nb = graph.neighbors(i)
        for j in nb:
            e = (i, j) if i < j else (j, i)
            if e not in train:
                train.add(e)
                if len(train) == target:
                    return _finish(graph, train)
        beta = int(draw_burn_count(rng, p_f))
        if beta == 0:
            continue
        cands = [j for j in nb if not burned[j] and not queued[j]]
        take = min(beta, len(cands))
        if take == 0:
            continue
        for idx in rng.choice(len(cands), size=take, replace=False).tolist():
            v = cands[idx]
            queued[v] = True
            queue.append(v)


def sample_pr(graph: Graph, s_f: float, seed: int) -> Partition:
    """Uniformly random training subset via a partial Fisher-Yates shuffle."""
    target = target_size(graph.edge_count, s_f)
    rng = make_rng(seed)
    edges = list(graph.edges)
    total = len(edges)
    swaps = rng.integers(np.arange(target), total).tolist()
    for k, r in enumerate(swaps):
        edges[k], edges[r] = edges[r], edges[k]
    return _finish(graph, set(edges[:target]))


def walk_trace(graph: Graph, steps: int, seed: int, *, metropolis: bool = True,
               start: int | None = None) -> np.ndarray:
    """Node positions of a single walker over ``steps`` proposals.

    With ``metropolis`` the acceptance rule of `sample_mhrw` applies and a
    rejected proposal records the current node again (a stay-step). Without
    it every proposal is accepted, giving a plain random walk. The random
    stream is consumed exactly as in `sample_mhrw`.
    """
    rng = make_rng(seed)
    i = _start_node(graph, rng, start)
    nbrs = [graph.neighbors(v) for v in range(graph.node_count)]
    deg = [len(a) for a in nbrs]
    if deg[i] == 0:
        raise SamplingError(f"start node {i} is isolated")
    out = np.empty(steps, dtype=np.int64)
    size = 8192
    buf = rng.random(size).tolist()
    pos = 0
    for t in range(steps):
        if pos + 2 > size:
            buf = rng.random(size).tolist()
            pos = 0
        ki = deg[i]
        j = nbrs[i][int(buf[pos] * ki)]
        u = buf[pos + 1]
        pos += 2
        if not metropolis or u <= min(1.0, ki / deg[j]):
            i = j
        out[t] = i
    return out


def sample(graph: Graph, spec: SamplerSpec) -> Partition:
    """Run the sampler described by ``spec``."""
    method = spec.method
    if method is Method.BFS:
        return sample_bfs(graph, spec.s_f, spec.seed)
    if method is Method.MHRW:
        return sample_mhrw(graph, spec.s_f, spec.seed)
    if method is Method.FS:
        return sample_fs(graph, spec.s_f, spec.m, spec.seed)
    if method is Method.FF:
        return sample_ff(graph, spec.s_f, spec.p_f, spec.seed)
    return sample_pr(graph, spec.s_f, spec.seed)
