"""Hypergraphlet kernels on vertex- and hyperedge-labeled hypergraphs."""

__version__ = "0.1.0"

from .errors import DataError, FormatError, NumericalError
from .hypermodel import Hypergraph, NeighborhoodHypergraph, parse_hypergraph, read_hgr, write_hgr
from .duality import DualHypergraph, LinkQuery, dualize, enumerate_candidates, extend_dual
from .hypergraphlets import (
    ALL_OPS,
    EDGE_INDEL,
    EDGE_LABEL_SUB,
    VERTEX_LABEL_SUB,
    FeatureVector,
    RootedHypergraphlet,
    apply_edit_smoothing,
    canonicalize,
    count_all,
    count_hypergraphlets,
    edit_neighborhood,
    enumerate_base,
)
from .kernels import KernelMatrix, KernelSpec, combine_kernels, gram_matrix, kernel_value
from .baselines import SequenceRecord, WalkConfig, pairwise_spectrum_kernel, random_walk_kernel, spectrum_features
from .polya import automorphism_group, count_labeled, cycle_index, kappa, partition_classes
from .learn import LabeledDataset, TrainedModel, auc, cluster_alphabet, cross_validate, predict, svm_train

__all__ = [
    "DataError", "FormatError", "NumericalError",
    "Hypergraph", "NeighborhoodHypergraph", "parse_hypergraph", "read_hgr", "write_hgr",
    "DualHypergraph", "LinkQuery", "dualize", "extend_dual", "enumerate_candidates",
    "ALL_OPS", "VERTEX_LABEL_SUB", "EDGE_LABEL_SUB", "EDGE_INDEL",
    "RootedHypergraphlet", "FeatureVector", "canonicalize", "enumerate_base",
    "count_hypergraphlets", "count_all", "edit_neighborhood", "apply_edit_smoothing",
    "KernelSpec", "KernelMatrix", "kernel_value", "gram_matrix", "combine_kernels",
    "WalkConfig", "SequenceRecord", "random_walk_kernel", "spectrum_features", "pairwise_spectrum_kernel",
    "automorphism_group", "cycle_index", "count_labeled", "partition_classes", "kappa",
    "LabeledDataset", "TrainedModel", "svm_train", "predict", "auc", "cross_validate", "cluster_alphabet",
]
