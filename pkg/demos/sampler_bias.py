"""
What each sampler leaves in the probe set
=========================================

A sampler grows the training set E^T to s_f * |E| edges; the rest becomes
the probe set E^P that link prediction must recover. Different growth rules
leave structurally different probe edges behind.
"""

import numpy as np

from lpsampling.evaluator import average_histograms, probe_distribution
from lpsampling.graph import generate_synthetic
from lpsampling.samplers import Method, SamplerSpec, sample, walk_trace

g = generate_synthetic("preferential-attachment", n=1000, m=3, triad_p=0.9, seed=7)
print(g)

###############################################################################
# Random walks visit nodes in proportion to degree. The Metropolis-Hastings
# correction (accept a move i -> j with probability min(1, k_i / k_j))
# flattens the visit frequency so every node is equally likely.

k = g.degrees()
for metropolis in (False, True):
    visits = np.bincount(walk_trace(g, 200_000, seed=1, metropolis=metropolis),
                         minlength=g.node_count)
    r = np.corrcoef(k, visits)[0, 1]
    print(f"metropolis={metropolis!s:5s} corr(degree, visits) = {r:+.3f}")

###############################################################################
# Fraction of probe edges whose endpoints share no neighbor in the training
# graph. Common-neighbor style predictors give those pairs a score of zero,
# so a sampler that leaves many of them behind makes prediction harder.

for method in (Method.PR, Method.MHRW, Method.BFS, Method.FF):
    hists = []
    for seed in range(20):
        part = sample(g, SamplerSpec(method, s_f=0.9, seed=seed))
        hists.append(probe_distribution(g, part.probe, "e_CN",
                                        degree_graph=part.train_graph(g)))
    mass = average_histograms(hists).mass
    print(f"{method.value:5s} P(e_CN = 0) = {mass[0]:.3f}   P(e_CN >= 3) = {sum(mass[3:]):.3f}")
