"""Key-leakage-storage capacity regions for noisy identifiers.

Numerical tools for the trade-off between secret-key rate, privacy-leakage
rate and public-storage rate when a key is agreed from noisy measurements
of a hidden source. Closed forms cover binary symmetric sources with
independent BSC measurements; a cardinality-bounded search handles general
finite alphabets.
"""

from .binary_region import (
    ComparisonReport,
    RateTriple,
    RegionBoundary,
    compare_regions,
    corner_point,
    hsm_chosen_boundary,
    hsm_generated_boundary,
    multi_encoder_corner,
    vsm_boundary,
)
from .generic_region import (
    AuxChannel,
    CardinalitySweepReport,
    SearchConfig,
    cardinality_sweep,
    evaluate_triple,
    pareto_search,
    scalarized_optimize,
    scalarized_sweep,
    timeshare,
)
from .info_math import (
    JointTable,
    ProbVector,
    binary_entropy,
    entropy,
    g_mixture,
    inv_binary_entropy,
    mutual_information,
    star,
)
from .masking import KeySpace, otp_unwrap, otp_wrap
from .models import (
    Channel,
    ModelFormatError,
    SizeGuardError,
    SourceModel,
    bss_model,
    build_joint,
    compose,
    inverse_channel,
    load_model,
    make_bsc,
    parallel,
    vsm_projection,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ProbVector",
    "JointTable",
    "binary_entropy",
    "inv_binary_entropy",
    "star",
    "entropy",
    "mutual_information",
    "g_mixture",
    "Channel",
    "SourceModel",
    "SizeGuardError",
    "ModelFormatError",
    "make_bsc",
    "compose",
    "parallel",
    "inverse_channel",
    "bss_model",
    "build_joint",
    "vsm_projection",
    "load_model",
    "RateTriple",
    "RegionBoundary",
    "ComparisonReport",
    "hsm_generated_boundary",
    "hsm_chosen_boundary",
    "vsm_boundary",
    "corner_point",
    "multi_encoder_corner",
    "compare_regions",
    "AuxChannel",
    "SearchConfig",
    "CardinalitySweepReport",
    "evaluate_triple",
    "scalarized_optimize",
    "scalarized_sweep",
    "pareto_search",
    "timeshare",
    "cardinality_sweep",
    "KeySpace",
    "otp_wrap",
    "otp_unwrap",
]
