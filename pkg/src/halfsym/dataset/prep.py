"""Normalization statistics, half-object datasets and full-shape reconstruction."""

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from joblib import Parallel, delayed

from ..exceptions import DatasetError, HalfsymError, InvalidInputError
from ..geometry import X0_PLANE, Plane, make_half_object, reconstruct_full, split_halves
from ..metrics.chamfer import symmetry_score
from ..sampling import farthest_point_sample
from ..validation import check_cloud, check_vector3
from .io import load_cloud, save_cloud
from .manifest import DatasetManifest, ManifestEntry, _one_line

log = logging.getLogger(__name__)

DENORM_MODES = ("default", "paper-literal")
MAX_FAILURE_RATE = 0.10


def compute_normalization(shapes):
    """Pooled per-axis mean and single scalar (population) std of a shape set.

    ``mean`` averages every point of every shape; ``scale`` is the standard
    deviation of all centered coordinates pooled across the three axes.
    """
    shapes = [check_cloud(s, name=f"shapes[{i}]") for i, s in enumerate(shapes)]
    if not shapes:
        raise InvalidInputError("cannot compute normalization of an empty shape set")
    n = sum(s.shape[0] for s in shapes)
    mean = np.array([math.fsum(v) for v in np.concatenate(shapes).T]) / n
    sq = math.fsum(float(((s - mean) ** 2).sum()) for s in shapes)
    scale = math.sqrt(sq / (3 * n))
    if not scale > 0:
        raise InvalidInputError("degenerate normalization: all points coincide (scale = 0)")
    return mean, scale


def normalize(cloud, mean, scale):
    return (check_cloud(cloud) - check_vector3(mean, "mean")) / float(scale)


def denormalize(cloud, mean, scale, mode="default"):
    """Undo normalization: ``x * scale + mean``.

    ``mode="paper-literal"`` applies ``x * scale - mean`` instead.
    """
    if not scale > 0:
        raise InvalidInputError(f"scale must be > 0, got {scale}")
    mean = check_vector3(mean, "mean")
    pts = check_cloud(cloud) * float(scale)
    if mode == "default":
        return pts + mean
    if mode == "paper-literal":
        return pts - mean
    raise InvalidInputError(f"denormalization mode must be one of {DENORM_MODES}, got {mode!r}")


def mirror_plane_after_denorm(mean, mode="default"):
    """Where the x = 0 plane ends up after :func:`denormalize`."""
    shift = mean[0] if mode == "default" else -mean[0]
    return Plane(np.array([1.0, 0.0, 0.0]), np.array([shift, 0.0, 0.0]))


def _stats_split(manifest, split=None):
    if split is not None:
        return split
    return "val" if manifest.select("val") else "train"


def stats_for_manifest(manifest, split=None):
    """Compute (mean, scale) over the ok shapes of ``split`` and record them."""
    split = _stats_split(manifest, split)
    entries = manifest.select(split)
    if not entries:
        raise DatasetError(f"no usable shapes in split {split!r} to derive statistics from")
    mean, scale = compute_normalization([manifest.load(e) for e in entries])
    manifest.set_stats(mean, scale, split, "population")
    return mean, scale


def _half_job(src, dst, dedup_boundary):
    try:
        cloud = load_cloud(src)
        halves = split_halves(cloud, dedup_boundary=dedup_boundary)
        half = make_half_object(cloud, dedup_boundary=dedup_boundary)
        save_cloud(half, dst)
        return half.shape[0], halves.empty_side, None
    except HalfsymError as exc:
        return 0, None, _one_line(exc)


def _check_failures(failed, total, what):
    if total and failed / total > MAX_FAILURE_RATE:
        raise DatasetError(
            f"aborting: {failed} of {total} {what} failed (limit {MAX_FAILURE_RATE:.0%})"
        )


def build_half_dataset(manifest, out_dir, dedup_boundary=False, stats_split=None, n_jobs=1):
    """Write mirrored half-objects for every training shape of ``manifest``.

    Non-training splits are referenced in place. Normalization statistics
    are copied from the input or, if absent, derived from ``stats_split``
    (default: ``val`` when present, else ``train``). Returns the new
    manifest, already written to ``out_dir/manifest.txt``.
    """
    out_dir = Path(out_dir).resolve()
    (out_dir / "train").mkdir(parents=True, exist_ok=True)
    out = DatasetManifest(
        label=manifest.label,
        kind="half",
        source=manifest.source or manifest.label,
        root=out_dir,
    )
    out.params = {
        "dedup_boundary": str(bool(dedup_boundary)).lower(),
        "plane": X0_PLANE.spec(),
    }
    train = [e for e in manifest.entries if e.split == "train" and e.ok]
    jobs = Parallel(n_jobs=n_jobs)(
        delayed(_half_job)(manifest.resolve(e), out_dir / "train" / f"{e.id}.npy", dedup_boundary)
        for e in train
    )
    results = dict(zip((e.id for e in train), jobs))
    failed = 0
    one_sided = 0
    for e in manifest.entries:
        if e.split == "train" and e.ok:
            n, empty_side, err = results[e.id]
            if err is None:
                out.entries.append(ManifestEntry(e.id, "train", f"train/{e.id}.npy", n))
                one_sided += empty_side is not None
            else:
                failed += 1
                out.entries.append(ManifestEntry(e.id, "train", "-", 0, "failed: " + err))
        elif e.ok:
            out.entries.append(ManifestEntry(e.id, e.split, out.relative(manifest.resolve(e)), e.n_points))
        else:
            out.entries.append(ManifestEntry(e.id, e.split, e.path, e.n_points, e.status))
    _check_failures(failed, len(train), "training shapes")
    if one_sided:
        out.notes.append(f"{one_sided} shapes had an empty half at x = 0")
    if manifest.has_stats:
        out.set_stats(manifest.mean, manifest.scale, manifest.stats_split, manifest.stats_estimator)
    else:
        split = _stats_split(manifest, stats_split)
        entries = manifest.select(split)
        if entries:
            mean, scale = compute_normalization([manifest.load(e) for e in entries])
            out.set_stats(mean, scale, split, "population")
    out.write()
    return out


@dataclass(frozen=True)
class ReconstructionRecord:
    id: str
    n_full: int
    n_out: int
    symmetry_full: float
    symmetry_out: float
    error: str = None


def _reconstruct_job(entry_id, src, dst, mean, scale, denorm, fps_target):
    try:
        half = load_cloud(src)
        full = reconstruct_full(half)
        sym_full = symmetry_score(full).value
        out = denormalize(full, mean, scale, mode=denorm)
        if fps_target:
            out = farthest_point_sample(out, fps_target)
        sym_out = symmetry_score(out, mirror_plane_after_denorm(mean, denorm)).value
        save_cloud(out, dst)
        return ReconstructionRecord(entry_id, full.shape[0], out.shape[0], sym_full, sym_out)
    except HalfsymError as exc:
        return ReconstructionRecord(entry_id, 0, 0, math.nan, math.nan, _one_line(exc))


def reconstruct_dataset(manifest, out_dir, mean=None, scale=None, denorm="default",
                        fps_target=2048, n_jobs=1):
    """Mirror, denormalize and downsample every ok shape of a half-shape manifest.

    ``fps_target`` of 0 or None keeps the full mirrored resolution. Returns
    ``(new_manifest, records)``; per-shape failures are recorded, and more
    than 10% failures abort with DatasetError.
    """
    if mean is None or scale is None:
        if not manifest.has_stats:
            raise DatasetError(
                "normalization statistics missing; run `halfsym stats` on the dataset "
                "(or pass a manifest that has them)"
            )
        mean, scale = manifest.mean, manifest.scale
    if denorm not in DENORM_MODES:
        raise InvalidInputError(f"denormalization mode must be one of {DENORM_MODES}")
    out_dir = Path(out_dir).resolve()
    entries = manifest.select()
    for split in {e.split for e in entries}:
        (out_dir / split).mkdir(parents=True, exist_ok=True)
    records = Parallel(n_jobs=n_jobs)(
        delayed(_reconstruct_job)(
            e.id, manifest.resolve(e), out_dir / e.split / f"{e.id}.npy",
            mean, scale, denorm, fps_target,
        )
        for e in entries
    )
    out = DatasetManifest(label=manifest.label, kind="full", source=manifest.source, root=out_dir)
    out.params = {
        "denorm": denorm,
        "fps_target": str(fps_target or 0),
        "plane": X0_PLANE.spec(),
    }
    out.set_stats(mean, scale, manifest.stats_split or "external", manifest.stats_estimator or "population")
    failed = 0
    for e, rec in zip(entries, records):
        if rec.error is None:
            out.entries.append(ManifestEntry(e.id, e.split, f"{e.split}/{e.id}.npy", rec.n_out))
        else:
            failed += 1
            out.entries.append(ManifestEntry(e.id, e.split, "-", 0, "failed: " + rec.error))
    _check_failures(failed, len(entries), "shapes")
    out.write()
    return out, records
