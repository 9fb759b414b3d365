"""
Network statistics of a giant component
=======================================

Load an edge list, keep its giant component and report the five summary
numbers used throughout: node count, edge count, average degree, average
clustering coefficient and degree heterogeneity <k^2>/<k>^2.
"""

import io

from lpsampling.graph import generate_synthetic, giant_component, parse_edge_list, stats

# An edge list may carry comments, extra columns and self-loops; the loader
# skips and counts what it cannot use.
text = io.StringIO("""# toy network
a b 1.0
b c
c a
c d
d d
e f
""")
g, report = parse_edge_list(text)
print("loaded", g, "skipped self-loops:", report.self_loops)

# The two-node component {e, f} is dropped.
gcc = giant_component(g)
print("giant component:", gcc.node_count, "nodes,", gcc.edge_count, "edges")

###############################################################################
# Synthetic graphs span the range of clustering and heterogeneity seen in
# real networks.

for kind, params in [("random-uniform", dict(n=1000, m=3000)),
                     ("preferential-attachment", dict(n=1000, m=3)),
                     ("preferential-attachment", dict(n=1000, m=3, triad_p=0.9)),
                     ("small-world", dict(n=1000, k=6, p=0.1))]:
    s = stats(giant_component(generate_synthetic(kind, seed=1, **params)))
    print(f"{kind:24s} {params!s:38s} <k>={s.avg_degree:5.2f} "
          f"C={s.clustering:.3f} H={s.heterogeneity:.2f}")
