"""Desk-scale laboratory for arithmetic sieves, orbit streams, Besicovitch
averaging, covering/shattering estimators, and number-theory experiments."""

__version__ = "0.1.0"

from .errors import ErgolabError, ParameterError, ResourceLimitError
from .arith import (
    ArithmeticTable,
    BFreeSpec,
    MertensPrefix,
    ModulusCheck,
    admissibility_report,
    bfree_indicator,
    brute_arith,
    is_admissible,
    mertens_prefix,
    primes_up_to,
    sieve_liouville,
    sieve_mobius,
)
from .dynsys import (
    BernoulliStream,
    OrbitStream,
    RotationStream,
    SkewStream,
    SturmianStream,
    SystemSpec,
    TableStream,
    VeechFunction,
    VeechSpec,
    WindowScan,
    to_state,
    veech_function,
    veech_window_closure,
)
from .averaging import (
    BanachDensity,
    BFreeGap,
    FolnerSchedule,
    SeminormEstimate,
    besicovitch_distance,
    besicovitch_seminorm,
    bfree_approximation_gap,
    folner_average,
    mean_equicontinuity_probe,
    upper_banach_density,
)
from .gc_stats import (
    BernoulliCoordinateFamily,
    CoveringBounds,
    DeviationResult,
    EmpiricalSample,
    EntropyPoint,
    FiniteFamily,
    FunctionFamily,
    RotationFamily,
    ShatterProbability,
    SubshiftWindowFamily,
    covering_number,
    empirical_sample,
    empirical_sup_deviation,
    entropy_rate,
    is_shattered,
    shattering_dimension,
    shattering_probability,
)
from .experiments import (
    average_chowla,
    chowla_decay,
    correlations,
    davenport_sum,
    disjointness_sum,
    interval_second_moment,
    partition_mertens_sum,
    random_mertens_sim,
    short_interval_sup,
    zhan_sup,
)
from .harness import list_experiments, run_experiment

__all__ = [
    "ErgolabError",
    "ParameterError",
    "ResourceLimitError",
    "ArithmeticTable",
    "BFreeSpec",
    "MertensPrefix",
    "ModulusCheck",
    "admissibility_report",
    "bfree_indicator",
    "brute_arith",
    "is_admissible",
    "mertens_prefix",
    "primes_up_to",
    "sieve_liouville",
    "sieve_mobius",
    "BernoulliStream",
    "OrbitStream",
    "RotationStream",
    "SkewStream",
    "SturmianStream",
    "SystemSpec",
    "TableStream",
    "VeechFunction",
    "VeechSpec",
    "WindowScan",
    "to_state",
    "veech_function",
    "veech_window_closure",
    "BanachDensity",
    "BFreeGap",
    "FolnerSchedule",
    "SeminormEstimate",
    "besicovitch_distance",
    "besicovitch_seminorm",
    "bfree_approximation_gap",
    "folner_average",
    "mean_equicontinuity_probe",
    "upper_banach_density",
    "BernoulliCoordinateFamily",
    "CoveringBounds",
    "DeviationResult",
    "EmpiricalSample",
    "EntropyPoint",
    "FiniteFamily",
    "FunctionFamily",
    "RotationFamily",
    "ShatterProbability",
    "SubshiftWindowFamily",
    "covering_number",
    "empirical_sample",
    "empirical_sup_deviation",
    "entropy_rate",
    "is_shattered",
    "shattering_dimension",
    "shattering_probability",
    "average_chowla",
    "chowla_decay",
    "correlations",
    "davenport_sum",
    "disjointness_sum",
    "interval_second_moment",
    "partition_mertens_sum",
    "random_mertens_sim",
    "short_interval_sup",
    "zhan_sup",
    "list_experiments",
    "run_experiment",
]
