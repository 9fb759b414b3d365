"""Link prediction benchmarks where the train/probe split comes from a graph sampler.

Five edge samplers (BFS, MHRW, FS, FF, PR) split a network's edges into a
training and a probe set; ten local similarity indices are then scored on
the training graph and evaluated by AUC and precision.
"""

__version__ = "0.1.0"

from .graph import (Graph, GraphStats, EdgeListError, EmptyGraphError, load_edge_list,
                    parse_edge_list, giant_component, stats, edge_popularity,
                    common_neighbors_count, generate_synthetic)
from .samplers import (Method, SamplerSpec, Partition, SamplingError, SamplerStalled,
                       sample, sample_bfs, sample_mhrw, sample_fs, sample_ff, sample_pr)
from .predictors import Measure, MEASURES, score, score_pairs, score_candidates, enumerate_non_edges
from .evaluator import (EvalScore, Histogram, auc_sampled, auc_exact, precision, evaluate,
                        probe_distribution, average_histograms)
from .harness import (ExperimentConfig, ExperimentResult, run_experiment, run_sweep,
                      best_measure_table, emit_results, stats_report)
