"""
Which predictor wins depends on the sampler
===========================================

Repeat the sample / score / evaluate loop for every sampler and measure,
then list the measures whose mean AUC is within 0.005 of the best in each
cell. Seeds derive from one master seed, so every number here is
reproducible and independent of the order cells are run in.
"""

from lpsampling.graph import generate_synthetic, giant_component
from lpsampling.harness import (DatasetSpec, ExperimentConfig, best_measure_table,
                                format_best_table, format_results_table, run_experiment)
from lpsampling.samplers import Method, SamplerSpec

graphs = {
    "clustered": generate_synthetic("preferential-attachment", n=500, m=3, triad_p=0.9,
                                    seed=7),
    "sparse": giant_component(generate_synthetic("small-world", n=1000, k=4, p=0.3, seed=3)),
}
config = ExperimentConfig(
    datasets=tuple(DatasetSpec(name, path=f"{name}.txt") for name in graphs),
    samplers=(SamplerSpec(Method.PR), SamplerSpec(Method.MHRW), SamplerSpec(Method.FS, m=100),
              SamplerSpec(Method.BFS), SamplerSpec(Method.FF, p_f=0.8)),
    repetitions=10, auc_n=20_000, seed=2024)

results = run_experiment(config, graphs)

###############################################################################
# Mean and spread of AUC and precision for two measures under PR and BFS.

print(format_results_table([r for r in results
                            if r.measure in ("CN", "RA") and r.sampler in ("PR", "BFS")]))
print()

###############################################################################
# Winners per (graph, sampler) cell.

print(format_best_table(best_measure_table(results, tie_tolerance=0.005)))
