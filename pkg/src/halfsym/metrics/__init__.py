from .chamfer import SymmetryScore, chamfer_distance, pairwise_chamfer, symmetry_score
from .emd import emd_approx, emd_exact
from .features import FeatureTable, MomentFeatures, extract_features
from .frechet import GaussianSummary, frechet_from_summaries, frechet_point_distance
from .nna import NNAResult, nna_from_matrix, one_nn_accuracy, pairwise_distances
from .report import MetricReport, build_report

__all__ = [
    "FeatureTable",
    "GaussianSummary",
    "MetricReport",
    "MomentFeatures",
    "NNAResult",
    "SymmetryScore",
    "build_report",
    "chamfer_distance",
    "emd_approx",
    "emd_exact",
    "extract_features",
    "frechet_from_summaries",
    "frechet_point_distance",
    "nna_from_matrix",
    "one_nn_accuracy",
    "pairwise_chamfer",
    "pairwise_distances",
    "symmetry_score",
]
