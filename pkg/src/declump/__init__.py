"""Seed-point based geometric partitioning of clumped regions.

Given a closed boundary enclosing several overlapping objects and one
seed point per object, the pipeline builds candidate partition segments
of two families (between boundary vertices, and from boundary vertices to
added interior vertices derived from a filtered Delaunay triangulation of
the seeds), votes between competing families, and rasterizes the winners
into one labeled region per seed.
"""

from .errors import DeclumpError
from .geom import ClosedBoundary, boundary_from_mask, delaunay, prepare_boundary, trace_boundary
from .harness import ClumpCase, EvalReport, GenParams, benchmark_cases, evaluate_case, generate_clump, run_batch
from .imaging import ScalarField, gaussian_blur, gradient_magnitude, intensity_field, inverted_image, sample_along_segment
from .pipeline import Config, PartitionResult, apply_cuts_to_mask, partition_clump

__version__ = "0.1.0"

__all__ = [
    "ClosedBoundary",
    "ClumpCase",
    "Config",
    "DeclumpError",
    "EvalReport",
    "GenParams",
    "PartitionResult",
    "ScalarField",
    "apply_cuts_to_mask",
    "benchmark_cases",
    "boundary_from_mask",
    "delaunay",
    "evaluate_case",
    "gaussian_blur",
    "generate_clump",
    "gradient_magnitude",
    "intensity_field",
    "inverted_image",
    "partition_clump",
    "prepare_boundary",
    "run_batch",
    "sample_along_segment",
    "trace_boundary",
    "__version__",
]
