"""Edge-cut kernelization and exact solvers for weighted cluster editing."""

from .instance import (
    EPS,
    ClusterEditError,
    Clustering,
    ContractError,
    EditSet,
    ForbiddenEditError,
    Instance,
    Mode,
    VertexError,
    apply_edits,
    closed_neighborhood,
    clustering_to_edits,
    connected_components,
    cut_weight,
    is_cluster_graph,
)
from .kernel import (
    Decision,
    KernelResult,
    NeighborhoodStats,
    decide,
    drop_clique_components,
    is_reducible,
    kernelize,
    stats,
    step1_complete,
    step2_prune,
    step3_merge,
    step3_real,
    step3_unweighted,
)
from .solver import GuardError, OptResult, branch_opt, brute_force_opt, lift_solution
from .generate import PlantedSpec, gen_planted, gen_random

__all__ = [name for name in dir() if not name.startswith("_")]
