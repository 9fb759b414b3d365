"""
Tuning Frontier Sampling and Forest Fire
========================================

FS runs m random walkers in parallel and advances the one chosen in
proportion to its current degree; more walkers spread the sample over more
of the graph. FF burns a Geometric(1 - p_f) number of neighbors per node;
a large p_f makes it behave like BFS.
"""

from lpsampling.graph import generate_synthetic
from lpsampling.harness import DatasetSpec, ExperimentConfig, SweepSpec, run_sweep
from lpsampling.samplers import Method

g = generate_synthetic("preferential-attachment", n=332, m=6, triad_p=0.9, seed=1)
graphs = {"usair_like": g}
base = dict(datasets=(DatasetSpec("usair_like", path="usair_like.txt"),),
            measures=("CN", "RA", "PA"), repetitions=20, auc_n=20_000, seed=5)

for sweep in (SweepSpec(Method.FS, "m", (1, 10, 100, 332)),
              SweepSpec(Method.FF, "p_f", (0.2, 0.5, 0.8))):
    config = ExperimentConfig(**base, sweep=sweep)
    print(f"{sweep.method.value} sweep over {sweep.param}")
    for r in run_sweep(config, graphs):
        value = r.m if sweep.param == "m" else r.p_f
        print(f"  {sweep.param}={value!s:4s} {r.measure:3s} AUC {r.auc_mean:.3f} ± {r.auc_std:.3f}")
