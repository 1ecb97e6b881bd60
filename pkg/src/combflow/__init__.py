"""Nested interval-partitions, combs, coalescent chains and bridge flows."""

from .backbone import (
    FiniteUMS,
    GromovComparison,
    backbone_distance,
    gromov_weak_compare,
    height_function,
    sample_distance_matrix,
    star_metric,
    tree_distance,
    validate_ultrametric,
)
from .bridges import (
    Bridge,
    adjacent_merge_evolution,
    bridge_from_interval_partition,
    compose,
    flow_comb,
    interval_partition_of,
    lambda_comb_step,
)
from .chains import (
    empirical_block_sizes,
    enumerate_compositions,
    enumerate_partitions,
    intertwining_check,
    simulate_composition_chain,
    simulate_partition_chain,
)
from .combs import (
    UNMERGED,
    Comb,
    FacePoint,
    Tooth,
    comb_distance,
    comb_function,
    distance_matrix,
    extended_distance,
    face_sets,
    mass_twin_combs,
    sample_kingman_comb,
)
from .evolve import EvolveStepRecord, evolving_kingman_step, stationarity_probe
from .intervals import (
    IntervalPartition,
    MassPartition,
    component_of,
    complement_intervals,
    dust_mass,
    hausdorff,
    locate_components,
    mass_partition,
)
from .paintbox import (
    CoalescentTrajectory,
    Composition,
    NestedCompositionTrajectory,
    Partition,
    empirical_interval_partition,
    ordered_paintbox,
    paintbox_sample,
    sample_positions,
    uniform_consistent_ordering,
)
from .rates import (
    BOLTHAUSEN_SZNITMAN,
    KINGMAN,
    BetaLambda,
    DiracLambda,
    LambdaMeasure,
    MixtureLambda,
    UniformLambda,
    adjacent_rate,
    merger_weights,
    parse_lambda_spec,
    rate,
    scaled,
)
from .rng import derive_seed, make_rng, replicate_rng
from .stats import TestReport, chi_square_uniform, ks_one_sample, ks_two_sample

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # intervals
    "IntervalPartition",
    "MassPartition",
    "component_of",
    "complement_intervals",
    "dust_mass",
    "hausdorff",
    "locate_components",
    "mass_partition",
    # combs
    "UNMERGED",
    "Comb",
    "FacePoint",
    "Tooth",
    "comb_distance",
    "comb_function",
    "distance_matrix",
    "extended_distance",
    "face_sets",
    "mass_twin_combs",
    "sample_kingman_comb",
    # paintbox
    "CoalescentTrajectory",
    "Composition",
    "NestedCompositionTrajectory",
    "Partition",
    "empirical_interval_partition",
    "ordered_paintbox",
    "paintbox_sample",
    "sample_positions",
    "uniform_consistent_ordering",
    # rates and chains
    "BOLTHAUSEN_SZNITMAN",
    "KINGMAN",
    "BetaLambda",
    "DiracLambda",
    "LambdaMeasure",
    "MixtureLambda",
    "UniformLambda",
    "adjacent_rate",
    "merger_weights",
    "parse_lambda_spec",
    "rate",
    "scaled",
    "empirical_block_sizes",
    "enumerate_compositions",
    "enumerate_partitions",
    "intertwining_check",
    "simulate_composition_chain",
    "simulate_partition_chain",
    # bridges
    "Bridge",
    "adjacent_merge_evolution",
    "bridge_from_interval_partition",
    "compose",
    "flow_comb",
    "interval_partition_of",
    "lambda_comb_step",
    # evolve
    "EvolveStepRecord",
    "evolving_kingman_step",
    "stationarity_probe",
    # backbone
    "FiniteUMS",
    "GromovComparison",
    "backbone_distance",
    "gromov_weak_compare",
    "height_function",
    "sample_distance_matrix",
    "star_metric",
    "tree_distance",
    "validate_ultrametric",
    # stats
    "TestReport",
    "chi_square_uniform",
    "ks_one_sample",
    "ks_two_sample",
    # rng
    "derive_seed",
    "make_rng",
    "replicate_rng",
]
