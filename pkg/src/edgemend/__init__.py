"""Consensus repair in weighted-averaging opinion networks.

A row-stochastic network averages opinions step by step; everyone ends
up at the centrality-weighted mean of the starting opinions. When some
opinions are pushed to an extreme, this package scores and recommends
new edges whose addition pulls the long-run consensus back, using exact
or random-walk-estimated first-passage times.
"""
from .adversary import attack_knapsack, attack_random
from .config import (ExperimentConfig, derive_seed, load_config,
                     parse_config_file, write_config)
from .errors import (ConfigError, EdgemendError, GraphFormatError,
                     MissingMfptError, NotConvergedError, StallError)
from .graph import (EdgePerturbation, Graph, ValidationReport,
                    add_edge_perturbed, from_dense, from_edges,
                    generate_scale_free, is_row_selfish, read_graph,
                    selfish_violations, validate, write_graph)
from .mfpt import (MfptTable, mfpt_estimate, mfpt_exact, walk_length_default,
                   write_mfpt_csv)
from .oracle import (GadgetInstance, brute_force_edges, build_gadget,
                     subset_sum_exists, verify_gadget)
from .perturbation import (ScoredEdge, edge_score, perturbed_centrality,
                           write_scores_csv)
from .recommend import (BatchRecord, RecommenderConfig, Trajectory,
                        recommend_edges, run_restore, select_sources,
                        write_trajectory_csv)
from .spectral import (CentralityVector, consensus_value, eigencentrality,
                       read_vector, validate_opinions, write_vector)

__version__ = "0.1.0"

__all__ = [
    "BatchRecord",
    "CentralityVector",
    "ConfigError",
    "EdgePerturbation",
    "EdgemendError",
    "ExperimentConfig",
    "GadgetInstance",
    "Graph",
    "GraphFormatError",
    "MfptTable",
    "MissingMfptError",
    "NotConvergedError",
    "RecommenderConfig",
    "ScoredEdge",
    "StallError",
    "Trajectory",
    "ValidationReport",
    "add_edge_perturbed",
    "attack_knapsack",
    "attack_random",
    "brute_force_edges",
    "build_gadget",
    "consensus_value",
    "derive_seed",
    "edge_score",
    "eigencentrality",
    "from_dense",
    "from_edges",
    "generate_scale_free",
    "is_row_selfish",
    "load_config",
    "mfpt_estimate",
    "mfpt_exact",
    "parse_config_file",
    "perturbed_centrality",
    "read_graph",
    "read_vector",
    "recommend_edges",
    "run_restore",
    "select_sources",
    "selfish_violations",
    "subset_sum_exists",
    "validate",
    "validate_opinions",
    "verify_gadget",
    "walk_length_default",
    "write_config",
    "write_graph",
    "write_mfpt_csv",
    "write_scores_csv",
    "write_trajectory_csv",
    "write_vector",
]
