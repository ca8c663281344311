"""Counterfactual path geometry over dataset graphs.

Score, select and navigate counterfactual journeys: vector-space path
comparison (normalization, branching points, direction differences,
opportunity potentials) and a directed k-NN multiverse over a dataset
with shortest-path journeys, branching factors and opportunity-aware
selection.
"""

from .bsp import BspConfig, BspError, construct_path_bsp
from .dataio import (
    DataError,
    Dataset,
    FeatureSchema,
    FeatureSpec,
    class_order,
    encode_and_scale,
    encode_instance,
    load_csv,
    load_schema,
)
from .graph import (
    CounterfactualReport,
    GraphError,
    GraphPath,
    MultiverseGraph,
    build_multiverse,
    candidate_reports,
    distances_to,
    diverse_alternatives,
    graph_from_json,
    graph_opportunity_potential,
    graph_to_json,
    monotonicity_distance,
    node_branching_factor,
    node_branching_factors,
    path_branching_factor,
    path_opportunity,
    pairwise_distances,
    select_optimal,
    shortest_path,
    shortest_path_tree,
    weighted_distance,
)
from .model import KnnClassifier, ModelError, PredictionTable, load_predictions
from .paths import (
    NormalizedPath,
    Path,
    PathError,
    direction_difference,
    find_branching_point,
    normalize_path,
    opportunity_matrix,
    path_from_json,
    path_length,
    path_to_json,
    point_to_path_distance,
    uniform_weights,
    vector_opportunity_potential,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
