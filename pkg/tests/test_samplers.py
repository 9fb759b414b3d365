import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import connected_graphs
from lpsampling.evaluator import average_histograms, probe_distribution
from lpsampling.graph import Graph, generate_synthetic
from lpsampling.rng import make_rng
from lpsampling.samplers import (Method, Partition, SamplerSpec, SamplerStalled, SamplingError,
                                 draw_burn_count, sample, sample_bfs, sample_ff, sample_fs,
                                 sample_mhrw, sample_pr, target_size, walk_trace)

ALL = [SamplerSpec(Method.BFS), SamplerSpec(Method.MHRW), SamplerSpec(Method.FS, m=2),
       SamplerSpec(Method.FF), SamplerSpec(Method.PR)]


def _check_partition(graph, part, s_f):
    assert part.train.isdisjoint(part.probe)
    assert part.train | part.probe == set(graph.edges)
    assert len(part.train) == target_size(graph.edge_count, s_f)


def test_target_size_is_exact_ceiling():
    assert target_size(10, 0.9) == 9
    assert target_size(3, 2 / 3) == 2
    assert target_size(2126, 0.9) == math.ceil(0.9 * 2126)
    assert target_size(7, 0.5) == 4
    with pytest.raises(ValueError):
        target_size(10, 0.05)


@given(connected_graphs(), st.sampled_from(ALL), st.floats(0.3, 1.0),
       st.integers(0, 2**64 - 1))
def test_partition_invariants(graph, spec, s_f, seed):
    if s_f * graph.edge_count < 1:
        return
    spec = SamplerSpec(spec.method, s_f=s_f, m=min(spec.m, graph.node_count), seed=seed)
    part = sample(graph, spec)
    _check_partition(graph, part, s_f)
    assert sample(graph, spec) == part


@pytest.mark.parametrize("spec", ALL, ids=lambda s: s.method.value)
def test_full_fraction_leaves_empty_probe(spec, pa500):
    spec = SamplerSpec(spec.method, s_f=1.0, m=spec.m, seed=4)
    part = sample(pa500, spec)
    assert not part.probe
    assert len(part.probe_array()) == 0


# --- BFS -----------------------------------------------------------------------

def test_bfs_star_from_hub_takes_first_edges():
    star = Graph(5, [(0, v) for v in range(1, 5)])
    part = sample_bfs(star, 0.5, seed=0, start=0)
    assert part.train == {(0, 1), (0, 2)}


def test_bfs_triangle():
    tri = generate_synthetic("complete", n=3)
    for seed in range(20):
        part = sample_bfs(tri, 2 / 3, seed)
        assert len(part.train) == 2 and len(part.probe) == 1


def test_bfs_stops_mid_node():
    # path 0-1-2 plus a hub at 2: from 0 the third edge taken is (2, 3)
    g = Graph(6, [(0, 1), (1, 2), (2, 3), (2, 4), (2, 5)])
    part = sample_bfs(g, 0.6, seed=0, start=0)
    assert part.train == {(0, 1), (1, 2), (2, 3)}


def test_bfs_disconnected_raises():
    g = Graph(5, [(0, 1), (1, 2), (3, 4)])
    with pytest.raises(SamplingError):
        sample_bfs(g, 1.0, seed=0, start=3)


def test_bfs_degree_bias(pa500):
    deg = pa500.degrees()

    def mean_deg(part):
        nodes = np.unique(np.asarray(sorted(part.train)))
        return deg[nodes].mean()

    bfs = [mean_deg(sample_bfs(pa500, 0.5, s)) for s in range(100)]
    pr = [mean_deg(sample_pr(pa500, 0.5, s)) for s in range(100)]
    assert np.mean(bfs) > np.mean(pr)


# --- MHRW -------------------------------------------------------------------

def test_mhrw_ring_accepts_every_proposal():
    ring = generate_synthetic("ring", n=12)
    for seed in range(5):
        mh = walk_trace(ring, 500, seed, metropolis=True)
        plain = walk_trace(ring, 500, seed, metropolis=False)
        assert np.array_equal(mh, plain)
        assert np.all(mh[1:] != mh[:-1])


def test_mhrw_k3():
    k3 = generate_synthetic("complete", n=3)
    for seed in range(20):
        assert len(sample_mhrw(k3, 2 / 3, seed).train) == 2


def test_mhrw_train_is_walk_prefix(pa500):
    # walk_trace replays the same random stream as sample_mhrw
    seed = 123
    part = sample_mhrw(pa500, 0.3, seed)
    start = int(make_rng(seed).integers(pa500.node_count))
    trace = walk_trace(pa500, 200_000, seed)
    prev, have = start, set()
    for v in trace.tolist():
        if v != prev:
            e = (min(v, prev), max(v, prev))
            if e not in have:
                have.add(e)
                if len(have) == len(part.train):
                    break
        prev = v
    assert have == part.train


def test_mhrw_visits_closer_to_uniform(pa500):
    n = pa500.node_count
    uniform = np.full(n, 1.0 / n)
    dev_mh, dev_rw = [], []
    for seed in range(100):
        mh = np.bincount(walk_trace(pa500, 5000, seed), minlength=n) / 5000
        rw = np.bincount(walk_trace(pa500, 5000, seed, metropolis=False), minlength=n) / 5000
        dev_mh.append(np.abs(mh - uniform).sum())
        dev_rw.append(np.abs(rw - uniform).sum())
    assert np.mean(dev_mh) < np.mean(dev_rw)


def test_mhrw_step_budget():
    g = generate_synthetic("preferential-attachment", n=50, m=2, seed=0)
    with pytest.raises(SamplerStalled):
        sample_mhrw(g, 1.0, seed=1, max_steps=10)


# --- FS ----------------------------------------------------------------------

def test_fs_ring6_two_walkers():
    ring = generate_synthetic("ring", n=6)
    for seed in range(20):
        assert len(sample_fs(ring, 0.5, 2, seed).train) == 3


def test_fs_single_walker_traces_a_walk(pa500):
    # with one walker the sampled edges form one connected trail
    part = sample_fs(pa500, 0.2, 1, seed=3)
    g = Graph(pa500.node_count, sorted(part.train))
    nodes = {v for e in part.train for v in e}
    start = next(iter(nodes))
    stack, seen = [start], {start}
    while stack:
        for w in g.neighbors(stack.pop()):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    assert seen == nodes


@pytest.mark.parametrize("m", [0, 501])
def test_fs_rejects_bad_m(pa500, m):
    with pytest.raises(ValueError):
        sample_fs(pa500, 0.9, m, seed=0)


def test_fs_step_budget(pa500):
    with pytest.raises(SamplerStalled):
        sample_fs(pa500, 0.9, 10, seed=0, max_steps=100)


# --- FF -------------------------------------------------------------------

def test_burn_count_mean():
    draws = draw_burn_count(make_rng(2024), 0.8, size=1_000_000)
    assert draws.min() == 0
    assert abs(draws.mean() - 4.0) <= 0.02


def test_burn_count_small_pf_mostly_zero():
    draws = draw_burn_count(make_rng(1), 0.01, size=100_000)
    assert (draws == 0).mean() > 0.98


def test_ff_small_pf_grabs_single_nodes(pa500):
    # nothing spreads, so every burn is a restart at a random node
    part = sample_ff(pa500, 0.5, 1e-9, seed=5)
    _check_partition(pa500, part, 0.5)


def test_ff_rejects_bad_pf(pa500):
    with pytest.raises(ValueError):
        sample_ff(pa500, 0.9, 1.0, seed=0)


def _zero_cn_mass(graph, method, seeds, training):
    hists = []
    for s in seeds:
        part = sample(graph, SamplerSpec(method, s_f=0.9, seed=s))
        dg = part.train_graph(graph) if training else None
        hists.append(probe_distribution(graph, part.probe, "e_CN", degree_graph=dg))
    return average_histograms(hists).mass[0]


def test_ff_probe_bias_training_degrees(clustered):
    seeds = range(100)
    assert (_zero_cn_mass(clustered, Method.FF, seeds, True)
            > _zero_cn_mass(clustered, Method.PR, seeds, True))


@pytest.mark.xfail(strict=True, raises=AssertionError, reason="with full-graph e_CN the zero-bin ordering does not "
                   "hold on this generator; see the decisions ledger")
def test_ff_probe_bias_full_graph_degrees(clustered):
    seeds = range(100)
    assert (_zero_cn_mass(clustered, Method.FF, seeds, False)
            > _zero_cn_mass(clustered, Method.PR, seeds, False))


# --- PR -------------------------------------------------------------------

def test_pr_ten_edges():
    g = Graph(6, [(0, v) for v in range(1, 6)] + [(v, v + 1) for v in range(1, 5)] + [(1, 5)])
    assert g.edge_count == 10
    part = sample_pr(g, 0.9, seed=0)
    assert len(part.train) == 9 and len(part.probe) == 1


def test_pr_uniform_on_k4(k4):
    counts = dict.fromkeys(k4.edges, 0)
    for seed in range(10_000):
        for e in sample_pr(k4, 0.5, seed).train:
            counts[e] += 1
    for c in counts.values():
        assert abs(c / 10_000 - 0.5) <= 0.02


# --- spec objects ----------------------------------------------------------

def test_spec_roundtrip_and_labels():
    for spec in [SamplerSpec("fs", m=200, seed=3), SamplerSpec("FF", p_f=0.2),
                 SamplerSpec("PR", s_f=0.5)]:
        assert SamplerSpec.from_dict(spec.to_dict()) == spec
    assert SamplerSpec("FS", m=200).label == "FS(m=200)"
    assert SamplerSpec("FF", p_f=0.2).label == "FF(p_f=0.2)"
    assert SamplerSpec.from_dict("mhrw").method is Method.MHRW
    assert SamplerSpec("FS", m=7).params() == "s_f=0.9;m=7"


@pytest.mark.parametrize("kw", [{"method": "PR", "s_f": 0.0}, {"method": "FS", "m": 0},
                                {"method": "FF", "p_f": 1.0}, {"method": "XYZ"}])
def test_spec_validation(kw):
    with pytest.raises(ValueError):
        SamplerSpec(**kw)


def test_partition_repr_and_train_graph(pa500):
    part = sample_pr(pa500, 0.9, seed=1)
    assert isinstance(part, Partition)
    assert "train=" in repr(part)
    tg = part.train_graph(pa500)
    assert tg.node_count == pa500.node_count and set(tg.edges) == part.train
