"""Distributed greedy pursuit over networks of sensing nodes.

The package splits into layers: ``pursuit`` holds the local greedy solvers,
``signals`` draws jointly sparse problem instances, ``topology`` builds the
communication graphs, ``distributed`` runs the vote-and-refit diffusion,
``metrics`` scores recoveries, ``experiments`` sweeps full benchmarks, and
``estimators`` wraps the local solvers in the scikit-learn interface.
"""

from .distributed import RoundTrace, simulate, vote
from .estimators import FROGS, ModOMP, ModSP
from .experiments import (
    ExperimentConfig,
    emit_csv,
    emit_plotdata,
    preset_config,
    run_experiment,
    write_summary,
)
from .metrics import MetricsAccumulator, asce, modsp_iteration_bound, srer
from .pursuit import (
    PursuitResult,
    forward_add,
    frogs,
    least_squares_on_support,
    max_indices,
    mod_omp,
    mod_sp,
    resid,
    reverse_fetch,
    supp_accumulate,
)
from .signals import (
    Ensemble,
    ModelParams,
    NodeProblem,
    generate_ensemble,
    generate_matrices,
    generate_sensing_matrix,
    generate_signal,
    load_ensemble,
    save_ensemble,
)
from .topology import (
    Topology,
    random_topology,
    ring_topology,
    watts_strogatz,
)

__version__ = "0.1.0"

__all__ = [
    "Ensemble",
    "ExperimentConfig",
    "FROGS",
    "MetricsAccumulator",
    "ModOMP",
    "ModSP",
    "ModelParams",
    "NodeProblem",
    "PursuitResult",
    "RoundTrace",
    "Topology",
    "asce",
    "emit_csv",
    "emit_plotdata",
    "forward_add",
    "frogs",
    "generate_ensemble",
    "generate_matrices",
    "generate_sensing_matrix",
    "generate_signal",
    "least_squares_on_support",
    "load_ensemble",
    "max_indices",
    "mod_omp",
    "mod_sp",
    "modsp_iteration_bound",
    "preset_config",
    "random_topology",
    "resid",
    "reverse_fetch",
    "ring_topology",
    "run_experiment",
    "save_ensemble",
    "simulate",
    "srer",
    "supp_accumulate",
    "vote",
    "watts_strogatz",
    "write_summary",
    "__version__",
]
