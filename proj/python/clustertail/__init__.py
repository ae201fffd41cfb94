"""Heavy-tailed multi-type branching clusters: simulation, tail calculus and limiting measures."""

from ._core import (
    ClusterTailError,
    Model,
    enumerate_types,
    estimate_C_total,
    hill_estimate,
    sample_cluster,
    sample_clusters,
    sample_decomposition,
    solve_jA,
    sweep_probability,
    validate_json,
)

__all__ = [
    "ClusterTailError",
    "Model",
    "enumerate_types",
    "estimate_C_total",
    "hill_estimate",
    "sample_cluster",
    "sample_clusters",
    "sample_decomposition",
    "solve_jA",
    "sweep_probability",
    "validate_json",
]
