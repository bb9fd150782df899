"""Epsilon-nets, word compilation, and averaging-operator spectra for finite gate sets in SU(d)."""

from .compiler import (
    BoundInputs,
    CompilationResult,
    CoverReport,
    ScalingFit,
    clear_net_cache,
    compilation_to_json,
    compile_unitary,
    covering_stats,
    get_net,
    lower_bound_length,
    scaling_fit,
    subgroup_experiment,
    theorem1_length,
)
from .errors import (
    CompilationBudgetError,
    DimensionMismatchError,
    GateSetFormatError,
    NetSizeExceededError,
    NonUnitaryMatrixError,
)
from .estimators import GateCompiler, SpectralGapEstimator
from .gatesets import (
    GateSet,
    beta_embed,
    diagonal_generators,
    gd_generators,
    is_lps,
    lps_generators,
    parse_gateset,
    perturb,
    serialize_gateset,
)
from .haar_ds import MomentReport, ds_product_sample, ds_product_samples, moment_report
from .specgap import (
    MAX_TWO_J,
    GapEstimate,
    MixingBlock,
    irrep_lift,
    lambda_estimate,
    minimal_m,
    mixing_block,
    prop4_bound,
)
from .su import (
    MetricKind,
    SampleStats,
    VolumeConstants,
    ball_volume_su2,
    dist,
    haar_sample,
    haar_samples,
    hybrid_gap,
    su2_from_angles,
    volume_constants_fit,
)
from .vptree import VPTree
from .words import (
    NearestHit,
    Net,
    count_reduced_words,
    enumerate_net,
    evaluate_word,
    inverse_word,
    random_reduced_word,
    reduce_word,
    word_from_str,
    word_to_str,
)

__version__ = "0.1.0"

__all__ = [
    "BoundInputs",
    "CompilationBudgetError",
    "CompilationResult",
    "CoverReport",
    "DimensionMismatchError",
    "GapEstimate",
    "GateCompiler",
    "GateSet",
    "GateSetFormatError",
    "MAX_TWO_J",
    "MetricKind",
    "MixingBlock",
    "MomentReport",
    "NearestHit",
    "Net",
    "NetSizeExceededError",
    "NonUnitaryMatrixError",
    "SampleStats",
    "ScalingFit",
    "SpectralGapEstimator",
    "VPTree",
    "VolumeConstants",
    "ball_volume_su2",
    "beta_embed",
    "clear_net_cache",
    "compilation_to_json",
    "compile_unitary",
    "count_reduced_words",
    "covering_stats",
    "diagonal_generators",
    "dist",
    "ds_product_sample",
    "ds_product_samples",
    "enumerate_net",
    "evaluate_word",
    "gd_generators",
    "get_net",
    "haar_sample",
    "haar_samples",
    "hybrid_gap",
    "inverse_word",
    "irrep_lift",
    "is_lps",
    "lambda_estimate",
    "lower_bound_length",
    "lps_generators",
    "minimal_m",
    "mixing_block",
    "moment_report",
    "parse_gateset",
    "perturb",
    "prop4_bound",
    "random_reduced_word",
    "reduce_word",
    "scaling_fit",
    "serialize_gateset",
    "su2_from_angles",
    "subgroup_experiment",
    "theorem1_length",
    "volume_constants_fit",
    "word_from_str",
    "word_to_str",
]
