"""State spaces, Hamiltonian laws, free energies and the subadditivity engine."""

from felab.core.free_energy import (
    FLAG_APPROX_STATE,
    FLAG_SINGLE,
    FreeEnergyEstimate,
    LogZ,
    NumericalError,
    StateMC,
    annealed_bound,
    disorder_average,
    partition_function,
    quenched_free_energy,
)
from felab.core.laws import (
    HamiltonianLaw,
    HamiltonianSample,
    LawError,
    deterministic_law,
    scale_law,
    sum_laws,
    two_point_law,
    zero_law,
)
from felab.core.spaces import (
    COUNTING,
    PROBABILITY,
    StateSpace,
    finite_set,
    hypercube,
    paired_sphere,
    product_of_spheres,
    sphere,
    tree_leaves,
)
from felab.core.subadditivity import (
    COMMON,
    INDEPENDENT,
    HOLDS,
    INCONCLUSIVE,
    VIOLATED,
    SubadditivityReport,
    counterexample_gap,
    subadditivity_report,
    tilted_measure_mean_check,
    two_point_counterexample,
)

__all__ = [
    "COMMON",
    "FLAG_APPROX_STATE",
    "FLAG_SINGLE",
    "INDEPENDENT",
    "COUNTING",
    "HOLDS",
    "INCONCLUSIVE",
    "PROBABILITY",
    "VIOLATED",
    "FreeEnergyEstimate",
    "HamiltonianLaw",
    "HamiltonianSample",
    "LawError",
    "LogZ",
    "NumericalError",
    "StateMC",
    "StateSpace",
    "SubadditivityReport",
    "annealed_bound",
    "counterexample_gap",
    "deterministic_law",
    "disorder_average",
    "finite_set",
    "hypercube",
    "paired_sphere",
    "partition_function",
    "product_of_spheres",
    "quenched_free_energy",
    "scale_law",
    "sphere",
    "subadditivity_report",
    "sum_laws",
    "tilted_measure_mean_check",
    "tree_leaves",
    "two_point_counterexample",
    "two_point_law",
    "zero_law",
]
