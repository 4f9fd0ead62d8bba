"""Divisive graph clustering by repeated sampling and condensing."""
from .associate import AssociationForest, associate_multisource, associate_simple, resolve
from .cluster import (
    Branch,
    ClusterConfig,
    ClusterTrace,
    Dendrogram,
    Leaf,
    cluster,
    flatten,
    iter_leaves,
    n_leaves,
    validate_dendrogram,
)
from .dataio import (
    load_dendrogram,
    load_graph,
    load_labels,
    load_points,
    save_dendrogram,
    save_graph,
    save_labels,
    save_points,
)
from .errors import (
    ConfigurationError,
    CorruptForest,
    InvalidInput,
    InvalidParameter,
    ParseError,
    SampclustError,
    UndefinedRatio,
    UnreachableRepresentative,
)
from .graph import DirectedGraph, PointSet, build_knn_graph, connected_components, induced_subgraph
from .metrics import (
    ami,
    edge_positivity,
    graph_connectivity,
    nmi,
    positivity_after_removal,
    vertex_positivity,
)
from .pipeline import partition, sampling_clustering
from .postprocess import PruneConfig, hard_prune, smooth, soft_prune
from .summarize import CondenseConfig, SamplingConfig, condense, sample, score_vertices

__version__ = "0.1.0"
