import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import small_graphs
from oracles import naive_auc, naive_precision, naive_score, adjacency
from lpsampling.evaluator import (EvalScore, Histogram, auc_exact, auc_exact_many, auc_sampled,
                                  auc_sampled_many, average_histograms, evaluate, precision,
                                  precision_many, probe_distribution)
from lpsampling.graph import Graph, generate_synthetic
from lpsampling.predictors import MEASURES, Measure
from lpsampling.samplers import sample_pr


@st.composite
def splits(draw, max_nodes=7):
    """(n, train edges, nonempty probe edges) with at least one nonexistent pair."""
    n, edges = draw(small_graphs(min_nodes=3, max_nodes=max_nodes))
    assume(edges and len(edges) < n * (n - 1) // 2)
    mask = draw(st.lists(st.booleans(), min_size=len(edges), max_size=len(edges)))
    probe = [e for e, p in zip(edges, mask) if p]
    assume(probe)
    train = [e for e, p in zip(edges, mask) if not p]
    return n, train, probe


# --- AUC -----------------------------------------------------------------------

def test_auc_all_probe_above_nonexistent():
    # probe (0, 1) shares neighbor 2; pairs involving node 3 or 4 have CN 0
    train = Graph(5, [(0, 2), (1, 2), (3, 4)])
    assert auc_sampled("CN", train, [(0, 1)], n=2000, seed=1) == 1.0
    assert auc_exact("CN", train, [(0, 1)]) == 1.0


def test_auc_pure_ties_is_half():
    train = Graph(5, [])
    for m in MEASURES:
        assert auc_sampled(m, train, [(0, 1), (2, 3)], n=1000, seed=0) == 0.5
        assert auc_exact(m, train, [(0, 1), (2, 3)]) == 0.5


def test_auc_exact_one_probe_three_nonexistent():
    # path 0-1-2 plus probe (0, 2); nonexistent pairs (0,3), (1,3), (2,3)
    train = Graph(4, [(0, 1), (1, 2)])
    assert auc_exact("CN", train, [(0, 2)]) == 1.0
    assert auc_exact("CN", Graph(4, [(0, 1), (2, 3)]), [(1, 2)]) == 0.5


@pytest.mark.parametrize("removed", [((0, 1), (2, 3)), ((0, 1), (0, 2))])
def test_auc_exact_k4_minus_two_edges(removed):
    probe = removed[0]
    edges = [e for e in generate_synthetic("complete", n=4).edges if e not in removed]
    want = naive_auc("CN", 4, edges, [probe])
    assert auc_exact("CN", Graph(4, edges), [probe]) == float(want)


@given(splits())
def test_auc_exact_matches_oracle(data):
    n, train, probe = data
    got = auc_exact_many(Graph(n, train), probe)
    for m in MEASURES:
        assert got[m] == pytest.approx(float(naive_auc(m.value, n, train, probe)), abs=1e-12)


def test_auc_sampled_close_to_exact(pa500):
    part = sample_pr(pa500, 0.9, seed=2)
    train = part.train_graph(pa500)
    exact = auc_exact_many(train, part.probe, ["CN", "RA", "PA"])
    got = auc_sampled_many(train, part.probe, ["CN", "RA", "PA"], n=20_000, seed=3)
    for m, a in exact.items():
        sigma = math.sqrt(a * (1 - a) / 20_000)
        assert abs(got[m] - a) <= 3 * sigma + 1e-12


def test_auc_sampled_converges_over_seeds():
    g = generate_synthetic("preferential-attachment", n=60, m=2, triad_p=0.6, seed=4)
    part = sample_pr(g, 0.8, seed=0)
    train = part.train_graph(g)
    exact = auc_exact("RA", train, part.probe)
    sigma = math.sqrt(exact * (1 - exact) / 100_000)
    outliers = sum(abs(auc_sampled("RA", train, part.probe, n=100_000, seed=s) - exact) > 4 * sigma
                   for s in range(50))
    assert outliers <= 1


def test_auc_dense_graph_uses_enumeration():
    # K40 minus three edges: 2 of 780 pairs are nonexistent, below the 1% rejection cutoff
    edges = [e for e in generate_synthetic("complete", n=40).edges if e not in {(0, 1), (2, 3)}]
    train = Graph(40, edges[1:])
    probe = [edges[0]]
    a = auc_sampled("CN", train, probe, n=5000, seed=1)
    assert abs(a - auc_exact("CN", train, probe)) <= 4 * math.sqrt(0.25 / 5000)


def test_auc_measure_set_does_not_change_values(pa500):
    part = sample_pr(pa500, 0.9, seed=7)
    train = part.train_graph(pa500)
    full = auc_sampled_many(train, part.probe, MEASURES, n=5000, seed=11)
    for m in MEASURES:
        assert auc_sampled_many(train, part.probe, [m], n=5000, seed=11)[m] == full[m]


def test_auc_errors():
    k4 = generate_synthetic("complete", n=4)
    train = Graph(4, [e for e in k4.edges if e != (0, 1)])
    with pytest.raises(ValueError, match="complete"):
        auc_sampled("CN", train, [(0, 1)])
    with pytest.raises(ValueError, match="complete"):
        auc_exact("CN", train, [(0, 1)])
    with pytest.raises(ValueError, match="empty"):
        auc_sampled("CN", Graph(4, [(0, 1)]), [])
    with pytest.raises(ValueError, match="overlaps"):
        auc_exact("CN", Graph(4, [(0, 1)]), [(1, 0)])


# --- precision --------------------------------------------------------------

def test_precision_perfect_prediction():
    # K4 minus (0, 1) plus a pendant at 3: (0, 1) is the only pair with two common neighbors
    train = Graph(5, [(0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4)])
    assert precision("CN", train, [(0, 1)]) == 1.0


def test_precision_zero_when_probe_scores_zero():
    # probe (0, 5) has no common neighbor; the star's leaf pairs all score 1
    train = Graph(6, [(1, 2), (1, 3), (1, 4), (0, 4)])
    assert precision("CN", train, [(0, 5)]) == 0.0


@pytest.mark.parametrize("removed", [((0, 1), (2, 3)), ((0, 1), (0, 2))])
def test_precision_k4_minus_two_edges(removed):
    edges = [e for e in generate_synthetic("complete", n=4).edges if e not in removed]
    want = naive_precision("CN", 4, edges, [removed[0]])
    assert precision("CN", Graph(4, edges), [removed[0]]) == float(want)


@given(splits(max_nodes=8))
def test_precision_matches_oracle(data):
    n, train, probe = data
    got = precision_many(Graph(n, train), probe)
    for m in MEASURES:
        want = naive_precision(m.value, n, train, probe)
        assert got[m] == float(want)
        assert want.denominator <= len(probe) and len(probe) % want.denominator == 0


@given(splits(max_nodes=8), st.randoms(use_true_random=False))
def test_relabel_invariance(data, rnd):
    n, train, probe = data
    perm = list(range(n))
    rnd.shuffle(perm)
    g, gp = Graph(n, train), Graph(n, train).relabel(perm)
    probe_p = [(perm[i], perm[j]) for i, j in probe]
    a, b = auc_exact_many(g, probe), auc_exact_many(gp, probe_p)
    for m in MEASURES:
        assert a[m] == pytest.approx(b[m], abs=1e-12)
    # precision can only move when a score tie straddles the top-|probe| cut
    adj = adjacency(n, train)
    cands = [(i, j) for i in range(n) for j in range(i + 1, n) if j not in adj[i]]
    L = len(probe)
    pa, pb = precision_many(g, probe), precision_many(gp, probe_p)
    for m in MEASURES:
        s = sorted((naive_score(m.value, adj, *c) for c in cands), reverse=True)
        if len(s) <= L or s[L - 1] != s[L]:
            assert pa[m] == pb[m]


def test_precision_pa_on_larger_graph(pa500):
    part = sample_pr(pa500, 0.9, seed=3)
    train = part.train_graph(pa500)
    # brute-force ranking of every non-edge by degree product
    k = train.degrees()
    iu, ju = np.triu_indices(train.node_count, k=1)
    keep = np.array([not train.has_edge(i, j) for i, j in zip(iu.tolist(), ju.tolist())])
    iu, ju = iu[keep], ju[keep]
    s = k[iu] * k[ju]
    order = np.lexsort((ju, iu, -s))[: len(part.probe)]
    top = set(zip(iu[order].tolist(), ju[order].tolist()))
    assert precision("PA", train, part.probe) == len(top & part.probe) / len(part.probe)


def test_evaluate_bundles_scores(pa500):
    part = sample_pr(pa500, 0.9, seed=1)
    out = evaluate(part.train_graph(pa500), part.probe, ["CN", "PA"], auc_n=1000, seed=2)
    assert set(out) == {Measure.CN, Measure.PA}
    for v in out.values():
        assert isinstance(v, EvalScore)
        assert 0 <= v.auc <= 1 and 0 <= v.precision <= 1 and v.n_comparisons == 1000


def test_ra_beats_pa_under_pr(clustered):
    ra, pa = [], []
    for s in range(100):
        part = sample_pr(clustered, 0.9, seed=s)
        got = auc_sampled_many(part.train_graph(clustered), part.probe, ["RA", "PA"],
                               n=20_000, seed=s)
        ra.append(got[Measure.RA])
        pa.append(got[Measure.PA])
    assert np.mean(ra) >= np.mean(pa)


# --- distributions -----------------------------------------------------------

def test_star_leaf_edges_all_zero_popularity():
    star = Graph(5, [(0, v) for v in range(1, 5)])
    h = probe_distribution(star, star.edges, "e_pub")
    assert h.mass[0] == 1.0 and sum(h.mass) == 1.0


def test_triangle_edge_all_mass_at_one():
    g = Graph(4, [(0, 1), (1, 2), (0, 2), (2, 3)])
    h = probe_distribution(g, [(0, 1)], "e_CN")
    assert h.lower[1] == 1 and h.mass[1] == 1.0


def test_histogram_binning(clustered):
    part = sample_pr(clustered, 0.9, seed=0)
    for kind in ("e_pub", "e_CN"):
        h = probe_distribution(clustered, part.probe, kind)
        assert abs(sum(h.mass) - 1.0) <= 1e-9
        assert h.lower[0] == 0
        ht = probe_distribution(clustered, part.probe, kind,
                                degree_graph=part.train_graph(clustered))
        assert ht.binning == h.binning and abs(sum(ht.mass) - 1.0) <= 1e-9
    pub = probe_distribution(clustered, part.probe, "e_pub")
    assert all(b == 2 ** t for t, b in enumerate(pub.lower[1:]))


def test_average_histograms():
    a = Histogram("e_CN", (0, 1), (1.0, 0.0))
    b = Histogram("e_CN", (0, 1), (0.0, 1.0))
    assert average_histograms([a]) == a
    assert average_histograms([a, a]) == Histogram("e_CN", (0, 1), (1.0, 0.0), 2)
    assert average_histograms([a, b]).mass == (0.5, 0.5)
    with pytest.raises(ValueError):
        average_histograms([a, Histogram("e_CN", (0, 1, 2), (1.0, 0.0, 0.0))])
    with pytest.raises(ValueError):
        average_histograms([])


def test_distribution_errors():
    g = generate_synthetic("ring", n=5)
    with pytest.raises(ValueError):
        probe_distribution(g, [], "e_CN")
    with pytest.raises(ValueError):
        probe_distribution(g, [(0, 1)], "e_xyz")
