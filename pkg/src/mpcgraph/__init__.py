"""Graph connectivity algorithms on a round-charged MPC simulator."""
from .conn2 import (AuxiliaryGraph, Biconnectivity, ComponentTrace, biconnectivity, bridges,
                    build_auxiliary_graph, compute_bac, connected_components, cut_vertices,
                    format_bridges, format_coloring, pipeline_config, subtree_minima)
from .dfs import DfsSequence, SamplingFailure, expand_copies, leaf_sampling_dfs
from .graph import (ComponentLabeling, DepthMap, Graph, GraphFormatError, ParentMap,
                    bidiameter_exact, compute_depths, diameter_exact, format_edge_list,
                    generate, parse_edge_list, random_parent_map, spanning_forest)
from .mpc import MachineConfig, RoundLedger, audit_load, configure, dumps_report, report
from .rmq import RmqIndex, ShortRangeError, rmq_arrays, rmq_batch, rmq_preprocess
from .tree import (CompressedTree, DoublingTable, LcaAnswer, build_doubling, compress, lca_arrays,
                   lca_batch, multipaths, multipaths_flat, prepare)

__all__ = [
    "AuxiliaryGraph", "Biconnectivity", "ComponentLabeling", "ComponentTrace", "CompressedTree",
    "DepthMap", "DfsSequence", "DoublingTable", "Graph", "GraphFormatError", "LcaAnswer",
    "MachineConfig", "ParentMap", "RmqIndex", "RoundLedger", "SamplingFailure", "ShortRangeError",
    "audit_load", "bidiameter_exact", "biconnectivity", "bridges", "build_auxiliary_graph",
    "build_doubling", "compress", "compute_bac", "compute_depths", "configure",
    "connected_components", "cut_vertices", "diameter_exact", "dumps_report", "expand_copies",
    "format_bridges", "format_coloring", "format_edge_list", "generate", "lca_arrays",
    "lca_batch", "leaf_sampling_dfs", "multipaths", "multipaths_flat", "parse_edge_list",
    "pipeline_config", "prepare", "random_parent_map", "report", "rmq_arrays", "rmq_batch",
    "rmq_preprocess", "spanning_forest", "subtree_minima",
]
