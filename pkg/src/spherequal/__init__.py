"""Quality measures for point configurations on the unit sphere S^d.

Sum of distances, spherical cap L2 discrepancy and worst-case integration
error, with Monte Carlo checks of the invariance identities linking them.
"""

from .errors import (DegenerateInputError, DomainError, NumericalError, ParseError,
                     PositiveDefinitenessError, SphereQualityError, UnsupportedDimensionError)
from .geometry import McConfig, PointSet, sample_uniform
from .kernels import KernelSpec, WeightFunction, kernel_mean, kernel_unweighted, kernel_weighted
from .pointsets import GeneratorSpec, generate, load_csv, save_csv
from .quality import (QualityReport, analyze, energy_gap, invariance_residual, sum_of_distances,
                      weighted_wce, worst_case_error)
from .special import area_ratio, distance_constant, mean_distance

__version__ = "0.1.0"

__all__ = [
    "DegenerateInputError", "DomainError", "GeneratorSpec", "KernelSpec", "McConfig",
    "NumericalError", "ParseError", "PointSet", "PositiveDefinitenessError", "QualityReport",
    "SphereQualityError", "UnsupportedDimensionError", "WeightFunction", "analyze", "area_ratio",
    "distance_constant", "energy_gap", "generate", "invariance_residual", "kernel_mean",
    "kernel_unweighted", "kernel_weighted", "load_csv", "mean_distance", "sample_uniform",
    "save_csv", "sum_of_distances", "weighted_wce", "worst_case_error",
]
