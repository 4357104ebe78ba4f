"""Command-line front end: ``halfsym {prep,stats,symmetry,reconstruct,eval,verify}``.

Exit status: 0 success, 1 partial failures, 2 invalid invocation or input.
Progress goes to stderr; results go to files and stdout.
"""

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np
from joblib import Parallel, delayed

from .dataset.manifest import load_manifest, verify_manifest
from .dataset.prep import DENORM_MODES, build_half_dataset, reconstruct_dataset, stats_for_manifest
from .exceptions import HalfsymError
from .geometry import Plane
from .metrics.chamfer import symmetry_score
from .metrics.features import FeatureTable, MomentFeatures, extract_features
from .metrics.frechet import frechet_point_distance
from .metrics.nna import one_nn_accuracy
from .metrics.report import (
    DEFAULT_BINS,
    build_report,
    write_histogram_csv,
    write_histogram_svg,
    write_scores_csv,
    write_summary_csv,
)

log = logging.getLogger("halfsym")

EXIT_OK, EXIT_PARTIAL, EXIT_INVALID = 0, 1, 2


class UsageError(Exception):
    pass


def _fmt(x):
    return repr(float(x))


def _out_dir(args, default):
    out = Path(args.output) if args.output else Path(default)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _manifest(path, label=None):
    if not Path(path).exists():
        raise UsageError(f"input does not exist: {path}")
    return load_manifest(path, label=label)


def _load_entries(manifest, entries, workers):
    """Load shapes in parallel; returns (loaded [(entry, cloud)], skipped [(entry, reason)])."""

    def job(e):
        try:
            return e, manifest.load(e), None
        except HalfsymError as exc:
            return e, None, str(exc)

    loaded, skipped = [], []
    for e, cloud, err in Parallel(n_jobs=workers)(delayed(job)(e) for e in entries):
        if err is None:
            loaded.append((e, cloud))
        else:
            log.warning("skipping %s: %s", e.id, err)
            skipped.append((e, err))
    return loaded, skipped


# --- commands ---------------------------------------------------------------


def cmd_prep(args):
    manifest = _manifest(args.input, label=args.class_label)
    out_dir = _out_dir(args, Path(args.input).with_name(Path(args.input).name + "_half"))
    log.info("building half-object dataset for %d shapes", len(manifest.entries))
    out = build_half_dataset(
        manifest, out_dir, dedup_boundary=args.dedup_boundary, n_jobs=args.workers
    )
    failed = sum(not e.ok for e in out.entries if e.split == "train")
    written = sum(e.ok for e in out.entries if e.split == "train")
    print(f"prepared {written} half-shapes, {failed} failed -> {out_dir / 'manifest.txt'}")
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_stats(args):
    manifest = _manifest(args.input, label=args.class_label)
    mean, scale = stats_for_manifest(manifest, args.split)
    if args.output:
        path = manifest.write(Path(args.output))
    elif Path(args.input).is_file():
        path = manifest.write(Path(args.input))
    else:
        path = manifest.write()
    print(f"split={manifest.stats_split} mean={' '.join(_fmt(v) for v in mean)} scale={_fmt(scale)}")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_symmetry(args):
    manifest = _manifest(args.input, label=args.class_label)
    plane = Plane.parse(args.plane)
    out_dir = _out_dir(args, "symmetry_report")
    entries = manifest.select(args.split)
    unusable = [e for e in manifest.select(args.split, ok_only=False) if not e.ok]
    for e in unusable:
        log.warning("skipping %s: %s", e.id, e.status)
    if not entries:
        raise UsageError(f"no usable shapes in {args.input}")
    loaded, skipped = _load_entries(manifest, entries, args.workers)
    skipped += unusable
    if not loaded:
        raise UsageError("no shape could be loaded")
    log.info("scoring %d shapes", len(loaded))

    def job(e, cloud):
        d = plane.signed_distance(cloud)
        one_sided = bool(np.all(d >= 0) or np.all(d <= 0)) and bool(np.any(d != 0))
        return e.id, symmetry_score(cloud, plane).value, one_sided

    rows = Parallel(n_jobs=args.workers)(delayed(job)(e, c) for e, c in loaded)
    report = build_report([(sid, v) for sid, v, _ in rows], bins=args.bins, title=manifest.label)
    one_sided = [int(flag) for _, _, flag in rows]
    write_scores_csv(report, out_dir / "symmetry_scores.csv", extra={"one_sided": one_sided})
    write_histogram_csv(report, out_dir / "symmetry_histogram.csv")
    write_summary_csv(report, out_dir / "symmetry_summary.csv")
    write_histogram_svg(report, out_dir / "symmetry_histogram.svg")
    print(
        f"class={manifest.label} n={report.n} mean={report.mean:.6g} std={report.std:.6g} "
        f"min={report.min:.6g} max={report.max:.6g} skipped={len(skipped)}"
    )
    if any(one_sided):
        print(
            f"warning: {sum(one_sided)} shapes lie entirely on one side of the plane "
            "(half-objects?); their scores measure one-sidedness, not symmetry"
        )
    return EXIT_PARTIAL if skipped else EXIT_OK


def cmd_reconstruct(args):
    manifest = _manifest(args.input, label=args.class_label)
    stats_src = manifest
    if args.stats:
        stats_src = _manifest(args.stats)
    if not stats_src.has_stats:
        raise UsageError(
            "normalization statistics missing; run `halfsym stats --input <dataset>` "
            "first or pass --stats <manifest with stats>"
        )
    out_dir = _out_dir(args, "reconstructed")
    log.info("reconstructing %d shapes", len(manifest.select()))
    out, records = reconstruct_dataset(
        manifest, out_dir, stats_src.mean, stats_src.scale,
        denorm=args.denorm, fps_target=args.fps_target, n_jobs=args.workers,
    )
    with open(out_dir / "reconstruct_report.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "points_full", "symmetry_full", "points_out", "symmetry_out", "error"])
        for r in records:
            w.writerow([r.id, r.n_full, _fmt(r.symmetry_full), r.n_out, _fmt(r.symmetry_out), r.error or ""])
    good = [r for r in records if r.error is None]
    failed = len(records) - len(good)
    if good:
        print(
            f"reconstructed {len(good)} shapes ({failed} failed); "
            f"max symmetry before FPS {max(r.symmetry_full for r in good):.3g}, "
            f"mean after {np.mean([r.symmetry_out for r in good]):.3g}"
        )
    else:
        print(f"reconstructed 0 shapes ({failed} failed)")
    return EXIT_PARTIAL if failed else EXIT_OK


def _eval_sets(args):
    gen = _manifest(args.input)
    ref = _manifest(args.reference)
    ref_entries = ref.select(args.reference_split)
    if args.reference_split is None and ref.select("val"):
        ref_entries = ref.select("val")
    gen_loaded, gen_skipped = _load_entries(gen, gen.select(), args.workers)
    ref_loaded, ref_skipped = _load_entries(ref, ref_entries, args.workers)
    if not gen_loaded or not ref_loaded:
        raise UsageError("both the generated and the reference set need at least one shape")
    sizes = {c.shape[0] for _, c in gen_loaded + ref_loaded}
    if len(sizes) != 1:
        raise UsageError(f"resolution mismatch: point counts {sorted(sizes)}")
    return gen_loaded, ref_loaded, len(gen_skipped) + len(ref_skipped)


def cmd_eval(args):
    gen, ref, skipped = _eval_sets(args)
    out_dir = _out_dir(args, "eval_report")
    distances = ["cd", "emd"] if args.distance == "both" else [args.distance]
    union_ids = [f"gen:{e.id}" for e, _ in gen] + [f"ref:{e.id}" for e, _ in ref]
    summary = {"n_generated": len(gen), "n_reference": len(ref)}
    for dist in distances:
        log.info("1-NNA with %s over %d shapes", dist, len(union_ids))
        res = one_nn_accuracy(
            [c for _, c in gen], [c for _, c in ref], distance=dist,
            emd_tolerance=args.emd_tol, n_jobs=args.workers, return_details=True,
        )
        summary[f"1nna_{dist}"] = res.accuracy
        summary[f"1nna_{dist}_ties"] = res.ties
        with open(out_dir / f"nearest_{dist}.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["id", "nearest", "distance", "correct"])
            for k, sid in enumerate(union_ids):
                w.writerow([sid, union_ids[res.nearest[k]], _fmt(res.nearest_distance[k]), int(res.correct[k])])

    if args.features:
        extractor = FeatureTable.from_csv(args.features)
    else:
        extractor = MomentFeatures()
    f_gen = np.array([extract_features(c, extractor, shape_id=e.id) for e, c in gen])
    f_ref = np.array([extract_features(c, extractor, shape_id=e.id) for e, c in ref])
    summary["fpd"] = frechet_point_distance(f_gen, f_ref)
    summary["fpd_extractor"] = extractor.label
    if len(f_ref) >= 2:
        perm = np.random.default_rng(args.seed).permutation(len(f_ref))
        half = len(f_ref) // 2
        summary["fpd_reference_split"] = frechet_point_distance(f_ref[perm[:half]], f_ref[perm[half:]])

    with open(out_dir / "eval_summary.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(summary))
        w.writerow([_fmt(v) if isinstance(v, float) else v for v in summary.values()])
    (out_dir / "eval_table.md").write_text(_eval_table(args.class_label or "shapes", summary, distances))
    print(_eval_table(args.class_label or "shapes", summary, distances), end="")
    return EXIT_PARTIAL if skipped else EXIT_OK


def _eval_table(label, summary, distances):
    cols = [f"1-NNA {d.upper()} (%)" for d in distances] + ["FPD"]
    vals = [f"{100 * summary[f'1nna_{d}']:.2f}" for d in distances] + [f"{summary['fpd']:.4g}"]
    lines = [
        f"| {label} | " + " | ".join(cols) + " |",
        "|---|" + "---|" * len(cols),
        "| generated | " + " | ".join(vals) + " |",
    ]
    if "fpd_reference_split" in summary:
        lines.append("| reference split (lower bound) | " + " | ".join(["-"] * len(distances))
                     + f" | {summary['fpd_reference_split']:.4g} |")
    lines.append("")
    lines.append(
        f"n_generated={summary['n_generated']} n_reference={summary['n_reference']} "
        f"fpd_extractor={summary['fpd_extractor']}"
    )
    return "\n".join(lines) + "\n"


def cmd_verify(args):
    manifest = _manifest(args.input)
    problems = verify_manifest(manifest)
    for sid, msg in problems:
        print(f"{sid}: {msg}")
    n = len(manifest.select())
    print(f"checked {n} entries, {len(problems)} problems")
    return EXIT_PARTIAL if problems else EXIT_OK


# --- argument parsing -------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True, help="manifest file or dataset directory")
    common.add_argument("--output", help="output directory (or manifest path for stats)")
    common.add_argument("--class", dest="class_label", help="class label, e.g. airplane")
    common.add_argument("--workers", type=int, default=1, help="parallel workers (default 1)")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="halfsym", description="Reflection-symmetry analysis, half-object datasets and point-cloud generation metrics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prep", parents=[common], help="build a mirrored half-object dataset")
    p.add_argument("--dedup-boundary", action="store_true",
                   help="send points with x == 0 to the right half only")
    p.set_defaults(func=cmd_prep)

    p = sub.add_parser("stats", parents=[common], help="derive normalization statistics")
    p.add_argument("--split", help="split to use (default: val if present, else train)")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("symmetry", parents=[common], help="per-shape reflection symmetry report")
    p.add_argument("--plane", default="1,0,0,0,0,0",
                   help="nx,ny,nz,px,py,pz (default 1,0,0,0,0,0)")
    p.add_argument("--bins", type=int, default=DEFAULT_BINS, help="histogram bins (default 50)")
    p.add_argument("--split", help="only score this split")
    p.set_defaults(func=cmd_symmetry)

    p = sub.add_parser("reconstruct", parents=[common], help="mirror, denormalize and FPS half-shapes")
    p.add_argument("--stats", help="manifest providing normalization statistics")
    p.add_argument("--fps-target", type=int, default=2048,
                   help="points per output shape; 0 keeps all (default 2048)")
    p.add_argument("--denorm", choices=DENORM_MODES, default="default")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("eval", parents=[common], help="1-NNA and FPD of generated vs reference")
    p.add_argument("--reference", required=True, help="reference manifest or directory")
    p.add_argument("--reference-split", help="reference split (default: val if present)")
    p.add_argument("--distance", choices=["cd", "emd", "both"], default="cd")
    p.add_argument("--emd-tol", type=float, default=0.01,
                   help="relative tolerance of approximate EMD (default 0.01)")
    p.add_argument("--features", help="external feature table CSV (id,f0,...) for FPD")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", parents=[common], help="check a manifest against its files")
    p.set_defaults(func=cmd_verify)
    return parser


def _setup_logging(verbose):
    # own handler on the package logger so progress reaches stderr even when
    # the host application (or a test runner) has configured logging already
    root = logging.getLogger("halfsym")
    for h in list(root.handlers):
        if getattr(h, "_halfsym_cli", False):
            root.removeHandler(h)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    handler._halfsym_cli = True
    root.addHandler(handler)
    root.setLevel(logging.INFO if verbose else logging.WARNING)
    root.propagate = False


def main(argv=None):
    args = build_parser().parse_args(argv)
    _setup_logging(args.verbose)
    try:
        return args.func(args)
    except (UsageError, HalfsymError) as exc:
        print(f"halfsym {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
