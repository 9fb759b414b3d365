"""Local similarity indices for scoring unconnected node pairs.

All indices read degrees and neighborhoods from the training graph only.
Ratio-form indices (SAI, JI, SPI, HPI, HDI, LHN) are 0 for pairs without a
common neighbor, and AA uses the natural logarithm.
"""

from __future__ import annotations

import enum
import math
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

from .graph import Graph

__all__ = [
    "Measure",
    "MEASURES",
    "CN_FAMILY",
    "ScoredPair",
    "score",
    "score_pairs",
    "score_candidates",
    "enumerate_non_edges",
    "cn_positive_pairs",
]


class Measure(str, enum.Enum):
    CN = "CN"
    AA = "AA"
    RA = "RA"
    SAI = "SAI"
    JI = "JI"
    SPI = "SPI"
    HPI = "HPI"
    HDI = "HDI"
    LHN = "LHN"
    PA = "PA"

    def __str__(self) -> str:
        return self.value


MEASURES: tuple[Measure, ...] = tuple(Measure)
# every measure whose score is zero exactly when the pair has no common neighbor
CN_FAMILY: tuple[Measure, ...] = tuple(m for m in Measure if m is not Measure.PA)

# summed measures are snapped to this many decimals so that equal sums
# accumulated in different orders still tie
_SNAP_DECIMALS = 12


class ScoredPair(NamedTuple):
    i: int
    j: int
    score: float


def score(measure: Measure | str, train: Graph, i: int, j: int) -> float:
    """Similarity of the pair ``(i, j)`` under ``measure``.

    Examples
    --------
    >>> from lpsampling.graph import Graph
    >>> g = Graph(4, [(0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])  # K4 minus (0, 1)
    >>> score("CN", g, 0, 1), score("PA", g, 0, 1), score("LHN", g, 0, 1)
    (2, 4, 0.5)
    """
    measure = Measure(measure)
    if i == j:
        raise ValueError("a node is not scored against itself")
    ni, nj = train.neighbor_set(i), train.neighbor_set(j)
    ki, kj = len(ni), len(nj)
    if measure is Measure.PA:
        return ki * kj
    common = ni & nj
    cn = len(common)
    if measure is Measure.CN:
        return cn
    if cn == 0:
        return 0.0
    if measure is Measure.AA:
        total = 0.0
        for q in sorted(common):
            kq = train.degree(q)
            assert kq >= 2, "a common neighbor always has degree >= 2"
            total += 1.0 / math.log(kq)
        return total
    if measure is Measure.RA:
        return sum(1.0 / train.degree(q) for q in sorted(common))
    if measure is Measure.SAI:
        return cn / math.sqrt(ki * kj)
    if measure is Measure.JI:
        return cn / len(ni | nj)
    if measure is Measure.SPI:
        return 2 * cn / (ki + kj)
    if measure is Measure.HPI:
        return cn / min(ki, kj)
    if measure is Measure.HDI:
        return cn / max(ki, kj)
    if measure is Measure.LHN:
        return cn / (ki * kj)
    raise AssertionError(measure)


def _degree_weights(k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    kf = k.astype(np.float64)
    inv = np.zeros_like(kf)
    inv_log = np.zeros_like(kf)
    pos = kf > 0
    inv[pos] = 1.0 / kf[pos]
    two = kf >= 2
    inv_log[two] = 1.0 / np.log(kf[two])
    return inv, inv_log


def score_pairs(train: Graph, us, vs,
                measures: Iterable[Measure | str] = MEASURES) -> dict[Measure, np.ndarray]:
    """Vectorized scores for the pairs ``(us[t], vs[t])``.

    Returns a mapping from measure to a float64 array aligned with the
    input pairs. AA and RA are rounded to 12 decimals so that mathematically
    equal sums compare equal.
    """
    measures = [Measure(m) for m in measures]
    us = np.asarray(us, dtype=np.int64)
    vs = np.asarray(vs, dtype=np.int64)
    k = train.degrees()
    ki = k[us].astype(np.float64)
    kj = k[vs].astype(np.float64)
    out: dict[Measure, np.ndarray] = {}
    if Measure.PA in measures:
        out[Measure.PA] = ki * kj
    if not any(m is not Measure.PA for m in measures):
        return out

    a = train.csr()
    if len(us):
        common = a[us].multiply(a[vs]).tocsr()
        cn = np.asarray(common.sum(axis=1)).ravel()
    else:
        common = sp.csr_matrix((0, train.node_count))
        cn = np.zeros(0)
    has = cn > 0
    inv, inv_log = _degree_weights(k)

    def ratio(den: np.ndarray, num: np.ndarray | None = None) -> np.ndarray:
        num = cn if num is None else num
        r = np.zeros_like(cn)
        np.divide(num, den, out=r, where=has)
        return r

    for m in measures:
        if m is Measure.PA:
            continue
        if m is Measure.CN:
            out[m] = cn.copy()
        elif m is Measure.AA:
            out[m] = np.round(common @ inv_log, _SNAP_DECIMALS)
        elif m is Measure.RA:
            out[m] = np.round(common @ inv, _SNAP_DECIMALS)
        elif m is Measure.SAI:
            out[m] = ratio(np.sqrt(ki * kj))
        elif m is Measure.JI:
            out[m] = ratio(ki + kj - cn)
        elif m is Measure.SPI:
            out[m] = ratio(ki + kj, 2.0 * cn)
        elif m is Measure.HPI:
            out[m] = ratio(np.minimum(ki, kj))
        elif m is Measure.HDI:
            out[m] = ratio(np.maximum(ki, kj))
        elif m is Measure.LHN:
            out[m] = ratio(ki * kj)
    return out


def score_candidates(measure: Measure | str, train: Graph,
                     candidates: Iterable[tuple[int, int]]) -> list[ScoredPair]:
    """Score candidate pairs and sort them by decreasing score.

    Ties are ordered canonically: by ``i`` then ``j`` with ``i < j``.
    """
    measure = Measure(measure)
    pairs = sorted({(i, j) if i < j else (j, i) for i, j in candidates})
    for i, j in pairs:
        if i == j:
            raise ValueError(f"pair ({i}, {j}) is a self-pair")
        if train.has_edge(i, j):
            raise ValueError(f"pair ({i}, {j}) is already a training edge")
    if not pairs:
        return []
    arr = np.asarray(pairs, dtype=np.int64)
    s = score_pairs(train, arr[:, 0], arr[:, 1], [measure])[measure]
    order = np.lexsort((arr[:, 1], arr[:, 0], -s))
    return [ScoredPair(int(arr[t, 0]), int(arr[t, 1]), float(s[t])) for t in order]


def enumerate_non_edges(train: Graph, restrict_to_cn_positive: bool = False
                        ) -> Iterator[tuple[int, int]]:
    """Yield every unordered pair ``i < j`` that is not a training edge.

    With ``restrict_to_cn_positive`` only pairs with at least one common
    training neighbor are produced; callers must account for the omitted
    zero-score pairs themselves.
    """
    n = train.node_count
    if restrict_to_cn_positive:
        us, vs = cn_positive_pairs(train)
        yield from zip(us.tolist(), vs.tolist())
        return
    for i in range(n):
        adj = train.neighbor_set(i)
        for j in range(i + 1, n):
            if j not in adj:
                yield (i, j)


def cn_positive_pairs(train: Graph) -> tuple[np.ndarray, np.ndarray]:
    """Canonically sorted non-edges ``i < j`` with at least one common neighbor."""
    a = train.csr()
    two = sp.triu(a @ a, k=1).tocsr()
    # drop pairs that already are training edges
    two = two - two.multiply(a)
    two.eliminate_zeros()
    two.sort_indices()
    coo = two.tocoo()
    order = np.lexsort((coo.col, coo.row))
    return coo.row[order].astype(np.int64), coo.col[order].astype(np.int64)


def pair_keys(us: np.ndarray, vs: np.ndarray, n: int) -> np.ndarray:
    """Encode canonical pairs as ``i * n + j`` int64 keys."""
    us = np.asarray(us, dtype=np.int64)
    vs = np.asarray(vs, dtype=np.int64)
    lo = np.minimum(us, vs)
    hi = np.maximum(us, vs)
    return lo * n + hi


def _as_pairs(pairs) -> np.ndarray:
    if isinstance(pairs, (set, frozenset)):
        pairs = sorted(pairs)
    arr = np.asarray(pairs, dtype=np.int64)
    if arr.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    return arr.reshape(-1, 2)
