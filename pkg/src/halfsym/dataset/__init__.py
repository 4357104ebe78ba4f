from .io import count_points, load_cloud, save_cloud
from .manifest import DatasetManifest, ManifestEntry, load_manifest, verify_manifest
from .prep import (
    build_half_dataset,
    compute_normalization,
    denormalize,
    normalize,
    reconstruct_dataset,
    stats_for_manifest,
)

__all__ = [
    "DatasetManifest",
    "ManifestEntry",
    "build_half_dataset",
    "compute_normalization",
    "count_points",
    "denormalize",
    "load_cloud",
    "load_manifest",
    "normalize",
    "reconstruct_dataset",
    "save_cloud",
    "stats_for_manifest",
    "verify_manifest",
]
