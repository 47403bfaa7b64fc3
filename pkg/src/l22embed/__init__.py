"""Embeddings of l2-squared metrics into l2 and sparsest-cut SDP rounding.

The package provides:

- validity checking and difference matrices for l2-squared configurations,
- scikit-learn style embedding estimators with contraction and distortion
  guarantees (squared-length, stable-rank, spectral line maps, and the
  enclosing-ellipsoid map),
- spectra: stable rank, Laplacian pencils, and the tail-mass bound,
- a desk-scale sparsest-cut SDP solver with point extraction,
- sweep-cut rounding with the r/delta eigenvalue certificate,
- seeded generators and a verification suite, wired into a CLI.
"""

__version__ = "0.1.0"

from ._validation import NotL22Error
from .embeddings import (
    DemandSpectral1DEmbedding,
    DemandSquaredLengthEmbedding,
    DistortionReport,
    GoemansEmbedding,
    LinearEmbedding,
    PairDistributionEmbedding,
    Spectral1DEmbedding,
    SquaredLengthEmbedding,
    StableRankEmbedding,
    distortion_report,
)
from .graphs import Cut, CutResult, WeightedGraph, cut_sparsity
from .mvee import EllipsoidResult, mvee_centered
from .pointset import (
    DEFAULT_L22_TOL,
    DifferenceMatrix,
    L22Report,
    PointSet,
    check_l22,
    difference_matrix,
    pair_index,
    validated,
    weighted_difference_matrix,
)
from .rounding import (
    RoundingOutcome,
    brute_force_sparsest_cut,
    round_sparsest_cut,
    sweep_round,
)
from .sdp import SdpInstance, SdpSolution, extract_points, load_solution, save_solution, solve_sdp
from .spectral import (
    DifferenceSpectrum,
    GeneralizedSpectrum,
    generalized_eigs,
    laplacian,
    stable_rank_bound,
    svd_spectrum,
    von_neumann_check,
)
from .verification import verify_key_lemma, verify_theorem_suite

__all__ = [
    "__version__",
    "NotL22Error",
    "PointSet",
    "L22Report",
    "DifferenceMatrix",
    "DEFAULT_L22_TOL",
    "check_l22",
    "validated",
    "pair_index",
    "difference_matrix",
    "weighted_difference_matrix",
    "WeightedGraph",
    "Cut",
    "CutResult",
    "cut_sparsity",
    "DifferenceSpectrum",
    "GeneralizedSpectrum",
    "svd_spectrum",
    "laplacian",
    "generalized_eigs",
    "von_neumann_check",
    "stable_rank_bound",
    "LinearEmbedding",
    "DistortionReport",
    "PairDistributionEmbedding",
    "SquaredLengthEmbedding",
    "DemandSquaredLengthEmbedding",
    "StableRankEmbedding",
    "Spectral1DEmbedding",
    "DemandSpectral1DEmbedding",
    "GoemansEmbedding",
    "distortion_report",
    "EllipsoidResult",
    "mvee_centered",
    "SdpInstance",
    "SdpSolution",
    "solve_sdp",
    "extract_points",
    "save_solution",
    "load_solution",
    "RoundingOutcome",
    "sweep_round",
    "brute_force_sparsest_cut",
    "round_sparsest_cut",
    "verify_key_lemma",
    "verify_theorem_suite",
]
