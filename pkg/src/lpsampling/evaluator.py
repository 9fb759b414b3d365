"""AUC, precision and probe-set distributions for a train/probe split.

AUC compares a uniformly drawn probe edge with a uniformly drawn
nonexistent pair (in neither the training nor the probe set) and counts
ties as one half. `auc_exact` evaluates the same quantity over all pairs of
(probe edge, nonexistent pair) and is meant for small graphs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .graph import Graph
from .predictors import (CN_FAMILY, MEASURES, Measure, _as_pairs, cn_positive_pairs,
                         pair_keys, score_pairs)
from .rng import make_rng

__all__ = [
    "EvalScore",
    "Histogram",
    "DEFAULT_AUC_N",
    "auc_sampled",
    "auc_sampled_many",
    "auc_exact",
    "auc_exact_many",
    "precision",
    "precision_many",
    "evaluate",
    "edge_values",
    "probe_distribution",
    "average_histograms",
]

DEFAULT_AUC_N = 100_000


@dataclass(frozen=True)
class EvalScore:
    auc: float
    precision: float
    n_comparisons: int


def _probe_array(train: Graph, probe) -> np.ndarray:
    arr = _as_pairs(sorted({(min(i, j), max(i, j)) for i, j in _as_pairs(probe).tolist()}))
    if len(arr) == 0:
        raise ValueError("probe set is empty")
    n = train.node_count
    if arr.min() < 0 or arr.max() >= n or np.any(arr[:, 0] == arr[:, 1]):
        raise ValueError("probe contains invalid node pairs")
    if any(train.has_edge(i, j) for i, j in arr.tolist()):
        raise ValueError("probe overlaps the training set")
    return arr


def _full_keys(train: Graph, probe: np.ndarray) -> np.ndarray:
    n = train.node_count
    t = train.edge_array()
    keys = np.concatenate([pair_keys(t[:, 0], t[:, 1], n), pair_keys(probe[:, 0], probe[:, 1], n)])
    return np.sort(keys)


def _n_nonexistent(n: int, n_full: int) -> int:
    return n * (n - 1) // 2 - n_full


def _nonexistent_pairs(n: int, full_keys: np.ndarray) -> np.ndarray:
    """All nonexistent pairs in canonical order (small graphs only)."""
    iu, ju = np.triu_indices(n, k=1)
    keys = iu.astype(np.int64) * n + ju
    keep = ~np.isin(keys, full_keys, assume_unique=False)
    return np.column_stack([iu[keep], ju[keep]]).astype(np.int64)


def _draw_nonexistent(n: int, full_keys: np.ndarray, count: int, rng) -> np.ndarray:
    """Uniform nonexistent pairs by rejection over all node pairs."""
    out = []
    have = 0
    while have < count:
        batch = max(1024, int((count - have) * 1.2))
        ij = rng.integers(n, size=(batch, 2))
        i, j = ij[:, 0], ij[:, 1]
        ok = i != j
        keys = pair_keys(i, j, n)
        # full_keys is never empty: the probe set is nonempty
        pos = np.minimum(np.searchsorted(full_keys, keys), len(full_keys) - 1)
        ok &= full_keys[pos] != keys
        good = ij[ok][: count - have]
        out.append(good)
        have += len(good)
    return np.concatenate(out)


def auc_sampled_many(train: Graph, probe, measures: Iterable[Measure | str] = MEASURES,
                     n: int = DEFAULT_AUC_N, seed: int = 0) -> dict[Measure, float]:
    """Sampled AUC for several measures sharing one set of ``n`` comparisons.

    The comparison draws depend only on ``(train, probe, n, seed)``, so a
    measure's AUC does not change when other measures are added or removed.
    """
    measures = [Measure(m) for m in measures]
    if n < 1:
        raise ValueError("n must be positive")
    probe = _probe_array(train, probe)
    nodes = train.node_count
    full = _full_keys(train, probe)
    missing = _n_nonexistent(nodes, len(full))
    if missing <= 0:
        raise ValueError("graph is complete: there are no nonexistent pairs to compare against")
    rng = make_rng(seed)
    pick = rng.integers(len(probe), size=n)
    if missing < 0.01 * (nodes * (nodes - 1) // 2):
        # rejection would mostly reject; draw from the explicit list instead
        pool = _nonexistent_pairs(nodes, full)
        non = pool[rng.integers(len(pool), size=n)]
    else:
        non = _draw_nonexistent(nodes, full, n, rng)
    sp_scores = score_pairs(train, probe[:, 0], probe[:, 1], measures)
    sn_scores = score_pairs(train, non[:, 0], non[:, 1], measures)
    out = {}
    for m in measures:
        a = sp_scores[m][pick]
        b = sn_scores[m]
        wins = int(np.count_nonzero(a > b))
        ties = int(np.count_nonzero(a == b))
        out[m] = (wins + 0.5 * ties) / n
    return out


def auc_sampled(measure: Measure | str, train: Graph, probe, n: int = DEFAULT_AUC_N,
                seed: int = 0) -> float:
    """Estimate AUC from ``n`` random (probe edge, nonexistent pair) comparisons."""
    m = Measure(measure)
    return auc_sampled_many(train, probe, [m], n=n, seed=seed)[m]


def _exact_from_scores(a: np.ndarray, b: np.ndarray) -> float:
    b = np.sort(b)
    less = np.searchsorted(b, a, side="left")
    leq = np.searchsorted(b, a, side="right")
    wins = int(less.sum())
    ties = int((leq - less).sum())
    return (wins + 0.5 * ties) / (len(a) * len(b))


def auc_exact_many(train: Graph, probe, measures: Iterable[Measure | str] = MEASURES
                   ) -> dict[Measure, float]:
    measures = [Measure(m) for m in measures]
    probe = _probe_array(train, probe)
    full = _full_keys(train, probe)
    if _n_nonexistent(train.node_count, len(full)) <= 0:
        raise ValueError("graph is complete: there are no nonexistent pairs to compare against")
    non = _nonexistent_pairs(train.node_count, full)
    sp_scores = score_pairs(train, probe[:, 0], probe[:, 1], measures)
    sn_scores = score_pairs(train, non[:, 0], non[:, 1], measures)
    return {m: _exact_from_scores(sp_scores[m], sn_scores[m]) for m in measures}


def auc_exact(measure: Measure | str, train: Graph, probe) -> float:
    """AUC averaged over every (probe edge, nonexistent pair) combination."""
    m = Measure(measure)
    return auc_exact_many(train, probe, [m])[m]


def _top_order(scores: np.ndarray, us: np.ndarray, vs: np.ndarray, limit: int) -> np.ndarray:
    """Indices of the ``limit`` best pairs by (-score, i, j)."""
    if len(scores) > 4 * limit:
        # cheap pre-cut that keeps every pair tying with the limit-th score
        kth = np.partition(-scores, limit - 1)[limit - 1]
        keep = np.flatnonzero(-scores <= kth)
        order = keep[np.lexsort((vs[keep], us[keep], -scores[keep]))]
    else:
        order = np.lexsort((vs, us, -scores))
    return order[:limit]


def _zero_fill(train: Graph, exclude_keys: np.ndarray, need: int) -> np.ndarray:
    """First ``need`` non-training pairs in canonical order that are not excluded."""
    n = train.node_count
    out = []
    have = 0
    for i in range(n - 1):
        js = np.arange(i + 1, n, dtype=np.int64)
        nb = np.fromiter(train.neighbor_set(i), dtype=np.int64)
        keys = i * n + js
        mask = ~np.isin(js, nb) & ~np.isin(keys, exclude_keys)
        js = js[mask][: need - have]
        if len(js):
            out.append(np.column_stack([np.full(len(js), i, dtype=np.int64), js]))
            have += len(js)
        if have >= need:
            break
    if not out:
        return np.empty((0, 2), dtype=np.int64)
    return np.concatenate(out)


def _top_pa(train: Graph, limit: int) -> np.ndarray:
    """Top ``limit`` non-training pairs by degree product, ties canonical.

    Nodes are visited in decreasing degree order and a row is paired only with
    later nodes, so every pair is seen once and rows whose best possible
    product falls below the running cut-off end the scan.
    """
    n = train.node_count
    k = train.degrees()
    order = np.lexsort((np.arange(n), -k))
    kd = k[order]
    bs, bu, bv = np.empty(0), np.empty(0, np.int64), np.empty(0, np.int64)
    cut = -math.inf
    pend_s, pend_u, pend_v = [], [], []
    pending = 0

    def trim():
        nonlocal bs, bu, bv, cut, pend_s, pend_u, pend_v, pending
        bs = np.concatenate([bs, *pend_s])
        bu = np.concatenate([bu, *pend_u])
        bv = np.concatenate([bv, *pend_v])
        pend_s, pend_u, pend_v, pending = [], [], [], 0
        idx = _top_order(bs, bu, bv, limit)
        bs, bu, bv = bs[idx], bu[idx], bv[idx]
        if len(bs) >= limit:
            cut = bs[-1]

    for p in range(n - 1):
        if kd[p] * kd[p + 1] < cut:
            break
        i = int(order[p])
        rest = order[p + 1:]
        s = (kd[p] * kd[p + 1:]).astype(np.float64)
        if cut > -math.inf:
            # kd is non-increasing, so the qualifying entries form a prefix
            stop = int(np.searchsorted(-s, -cut, side="right"))
            rest, s = rest[:stop], s[:stop]
        nb = np.fromiter(train.neighbor_set(i), dtype=np.int64)
        keep = ~np.isin(rest, nb)
        rest, s = rest[keep], s[keep]
        if len(rest) == 0:
            continue
        pend_s.append(s)
        pend_u.append(np.minimum(rest, i))
        pend_v.append(np.maximum(rest, i))
        pending += len(s)
        if pending >= 4 * limit:
            trim()
    trim()
    return np.column_stack([bu, bv])


def _top_pairs(measure: Measure, train: Graph, limit: int,
               cn_pairs: tuple[np.ndarray, np.ndarray] | None = None) -> np.ndarray:
    if measure is Measure.PA:
        return _top_pa(train, limit)
    us, vs = cn_positive_pairs(train) if cn_pairs is None else cn_pairs
    if len(us):
        s = score_pairs(train, us, vs, [measure])[measure]
        idx = _top_order(s, us, vs, limit)
        top = np.column_stack([us[idx], vs[idx]])
    else:
        top = np.empty((0, 2), dtype=np.int64)
    if len(top) < limit:
        # every remaining non-edge scores zero; pad in canonical order
        fill = _zero_fill(train, np.sort(pair_keys(us, vs, train.node_count)), limit - len(top))
        top = np.concatenate([top, fill])
    return top


def precision_many(train: Graph, probe, measures: Iterable[Measure | str] = MEASURES
                   ) -> dict[Measure, float]:
    measures = [Measure(m) for m in measures]
    probe = _probe_array(train, probe)
    n = train.node_count
    probe_keys = np.sort(pair_keys(probe[:, 0], probe[:, 1], n))
    limit = len(probe)
    cn_pairs = cn_positive_pairs(train) if any(m in CN_FAMILY for m in measures) else None
    out = {}
    for m in measures:
        top = _top_pairs(m, train, limit, cn_pairs)
        hits = np.isin(pair_keys(top[:, 0], top[:, 1], n), probe_keys).sum()
        out[m] = int(hits) / limit
    return out


def precision(measure: Measure | str, train: Graph, probe) -> float:
    """Share of probe edges among the top-``|probe|`` scored non-training pairs."""
    m = Measure(measure)
    return precision_many(train, probe, [m])[m]


def evaluate(train: Graph, probe, measures: Iterable[Measure | str] = MEASURES,
             auc_n: int = DEFAULT_AUC_N, seed: int = 0) -> dict[Measure, EvalScore]:
    """AUC (sampled) and precision for every measure on one split."""
    measures = [Measure(m) for m in measures]
    aucs = auc_sampled_many(train, probe, measures, n=auc_n, seed=seed)
    precs = precision_many(train, probe, measures)
    return {m: EvalScore(aucs[m], precs[m], auc_n) for m in measures}


# --- probe-set distributions ---------------------------------------------

KINDS = ("e_pub", "e_CN")


@dataclass(frozen=True)
class Histogram:
    """Probability mass over integer-valued bins.

    Bin ``t`` covers ``[lower[t], lower[t + 1])``; the last bin is closed on
    the right at the largest value of the designated graph. For ``e_pub``
    the bins are ``{0}`` followed by powers of two, for ``e_CN`` one bin per
    integer.
    """

    kind: str
    lower: tuple[int, ...]
    mass: tuple[float, ...]
    rep_count: int = 1

    @property
    def binning(self) -> tuple[str, tuple[int, ...]]:
        return (self.kind, self.lower)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "lower": list(self.lower), "mass": list(self.mass),
                "rep_count": self.rep_count}


def edge_values(graph: Graph, edges, kind: str) -> np.ndarray:
    """``e_pub`` or ``e_CN`` of each pair in ``edges``, using degrees of ``graph``."""
    arr = _as_pairs(edges)
    if kind == "e_pub":
        # an endpoint may be isolated in a training graph; clamp its factor at zero
        f = np.maximum(graph.degrees() - 1, 0)
        return f[arr[:, 0]] * f[arr[:, 1]]
    if kind == "e_CN":
        return score_pairs(graph, arr[:, 0], arr[:, 1], [Measure.CN])[Measure.CN].astype(np.int64)
    raise ValueError(f"unknown distribution kind {kind!r}; expected one of {KINDS}")


def _bins(kind: str, top: int) -> tuple[int, ...]:
    if kind == "e_CN":
        return tuple(range(top + 1))
    lower = [0]
    b = 1
    while b <= top:
        lower.append(b)
        b *= 2
    return tuple(lower)


def probe_distribution(full: Graph, probe, kind: str, *,
                       degree_graph: Graph | None = None) -> Histogram:
    """Distribution of ``e_pub`` or ``e_CN`` over the probe edges.

    Values are computed on ``degree_graph`` when given (e.g. the training
    graph) and on ``full`` otherwise. Bin edges depend only on ``full`` so
    histograms from different probe sets of one graph can be averaged.
    """
    arr = _as_pairs(probe)
    if len(arr) == 0:
        raise ValueError("probe set is empty")
    g = full if degree_graph is None else degree_graph
    vals = edge_values(g, arr, kind)
    top = int(edge_values(full, full.edge_array(), kind).max(initial=0))
    top = max(top, int(vals.max(initial=0)))
    lower = _bins(kind, top)
    idx = np.searchsorted(np.asarray(lower), vals, side="right") - 1
    counts = np.bincount(idx, minlength=len(lower))
    mass = counts / counts.sum()
    return Histogram(kind, lower, tuple(float(x) for x in mass), 1)


def average_histograms(hists: Sequence[Histogram]) -> Histogram:
    """Per-bin mean of histograms that share one binning."""
    if not hists:
        raise ValueError("no histograms to average")
    first = hists[0]
    for h in hists[1:]:
        if h.binning != first.binning:
            raise ValueError("histograms have different binnings")
    mass = np.mean(np.array([h.mass for h in hists], dtype=np.float64), axis=0)
    return Histogram(first.kind, first.lower, tuple(float(x) for x in mass), len(hists))
