"""Restricted integer compositions and the lognormality of their part product."""
from .asymptotics import AsymptoticConstants, asymptotic_constants, series_sum, series_sums
from .blocking import (
    BlockDecomposition,
    class_size,
    conditional_independence_check,
    decompose,
    default_parameters,
    reconstruct,
)
from .counting import (
    count_asymptotic,
    count_exact,
    count_truncated,
    log_moment_table,
    power_moment_sum,
    scaled_counts,
)
from .part_set import PartSet, TruncatedPartSet, denominator_polynomial, make_part_set, parse_exclude
from .roots import RootProfile, all_roots, principal_root
from .sampler import Composition, CompositionSampler, make_generator, sample_composition, sample_truncated

__version__ = "0.1.0"

__all__ = [
    "AsymptoticConstants",
    "BlockDecomposition",
    "Composition",
    "CompositionSampler",
    "PartSet",
    "RootProfile",
    "TruncatedPartSet",
    "all_roots",
    "asymptotic_constants",
    "class_size",
    "conditional_independence_check",
    "count_asymptotic",
    "count_exact",
    "count_truncated",
    "decompose",
    "default_parameters",
    "denominator_polynomial",
    "log_moment_table",
    "make_generator",
    "make_part_set",
    "parse_exclude",
    "power_moment_sum",
    "principal_root",
    "reconstruct",
    "sample_composition",
    "sample_truncated",
    "scaled_counts",
    "series_sum",
    "series_sums",
    "__version__",
]
