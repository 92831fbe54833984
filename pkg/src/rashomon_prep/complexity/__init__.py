"""Data complexity measures and dataset clustering."""

from .clustering import ClusterAssignment, cluster_datasets, lloyd, profile_matrix
from .dimensionality import dimensionality_metrics, pca_components_95
from .linearity import LinearModel, linearity_metrics, train_linear_classifier
from .neighborhood import NeighborhoodResult, neighborhood_metrics, prim_mst
from .overlap import (f1_measure, f1v_measure, f2_measure, f3_measure, f4_measure,
                      fisher_ratios, overlapping_metrics)
from .profile import (FAMILIES, MEASURES, ComplexityProfile, complexity_profile,
                      read_profiles, write_profiles_csv)

__all__ = [
    "ClusterAssignment", "cluster_datasets", "lloyd", "profile_matrix",
    "dimensionality_metrics", "pca_components_95",
    "LinearModel", "linearity_metrics", "train_linear_classifier",
    "NeighborhoodResult", "neighborhood_metrics", "prim_mst",
    "f1_measure", "f1v_measure", "f2_measure", "f3_measure", "f4_measure",
    "fisher_ratios", "overlapping_metrics",
    "FAMILIES", "MEASURES", "ComplexityProfile", "complexity_profile",
    "read_profiles", "write_profiles_csv",
]
