"""Code library: base families, named codes, products and the suite manifest."""

from .model import (
    CodeInstance,
    ValidationFailure,
    ValidationReport,
    brute_force_distance,
    empty_code,
    make_code,
    tensor_product,
    validate_code,
)
from .named import named_code
from .suite import (
    Suite,
    SuiteManifest,
    build_base_code,
    default_manifest,
    load_manifest,
    load_suite,
    load_suite_file,
    suite_stats,
)

__all__ = [
    "CodeInstance",
    "Suite",
    "SuiteManifest",
    "ValidationFailure",
    "ValidationReport",
    "brute_force_distance",
    "build_base_code",
    "default_manifest",
    "empty_code",
    "load_manifest",
    "load_suite",
    "load_suite_file",
    "make_code",
    "named_code",
    "suite_stats",
    "tensor_product",
    "validate_code",
]
