"""Mode perturbations for judging whether graph-learning datasets need both structure and features."""

__version__ = "0.1.0"

from .complement import (ComplementarityConfig, ModeComplementarity, ModeDiversity, complementarity,
                         compare_spaces, dataset_complementarity, lpq_norm, mode_diversity,
                         perturbed_complementarity)
from .core import AttributedGraph, GraphDataset, dataset_stats, graph_stats
from .ingest import ParseError, gen_erdos_renyi, gen_ring_of_cliques, load_dataset, parse_jsonl, parse_tu_dataset
from .lift import feature_distance, structural_lift
from .perturb import ModePerturbation, PerturbationKind, perturb_dataset, perturb_graph
from .pipeline import build_dataset_report
from .report import emit_report, taxonomy_classify
from .separability import (PerformanceSeparability, evaluate_separability, pairwise_separability,
                           permutation_test)

__all__ = [
    "AttributedGraph", "ComplementarityConfig", "GraphDataset", "ModeComplementarity", "ModeDiversity",
    "ModePerturbation", "ParseError", "PerformanceSeparability", "PerturbationKind", "build_dataset_report",
    "compare_spaces", "complementarity", "dataset_complementarity", "dataset_stats", "emit_report",
    "evaluate_separability", "feature_distance", "gen_erdos_renyi", "gen_ring_of_cliques", "graph_stats",
    "load_dataset", "lpq_norm", "mode_diversity", "pairwise_separability", "parse_jsonl", "parse_tu_dataset",
    "permutation_test", "perturb_dataset", "perturb_graph", "perturbed_complementarity", "structural_lift",
    "taxonomy_classify", "__version__",
]
