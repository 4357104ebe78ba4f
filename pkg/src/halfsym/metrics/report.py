"""Per-shape score reports: aggregates, histograms, CSV and SVG output."""

import csv
import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from ..exceptions import InvalidInputError

DEFAULT_BINS = 50


@dataclass(frozen=True)
class MetricReport:
    scores: tuple  # ((shape_id, value), ...)
    mean: float
    std: float
    min: float
    max: float
    bin_edges: np.ndarray
    counts: np.ndarray
    title: str = ""

    @property
    def n(self):
        return len(self.scores)


def build_report(scores, bins=DEFAULT_BINS, title=""):
    """Aggregate ``(id, value)`` pairs into a :class:`MetricReport`.

    Bins are equal-width over [min, max]; if every value is identical a
    single degenerate bin holds them all. Mean and (population) std use
    ``math.fsum`` so they do not depend on summation order.
    """
    scores = tuple((str(k), float(v)) for k, v in scores)
    if not scores:
        raise InvalidInputError("cannot build a report from zero scores")
    if int(bins) != bins or bins < 1:
        raise InvalidInputError(f"bins must be a positive integer, got {bins!r}")
    values = np.array([v for _, v in scores])
    if not np.all(np.isfinite(values)):
        raise InvalidInputError("scores contain NaN or Inf")
    n = len(values)
    mean = math.fsum(values) / n
    std = math.sqrt(math.fsum((values - mean) ** 2) / n)
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        edges = np.array([lo, hi])
        counts = np.array([n])
    else:
        counts, edges = np.histogram(values, bins=int(bins), range=(lo, hi))
    return MetricReport(scores, mean, std, lo, hi, edges, counts, title)


def _fmt(x):
    return repr(float(x))


def write_scores_csv(report, path, extra=None):
    """Per-shape table: ``id,value`` plus any ``extra`` columns {name: seq}."""
    extra = extra or {}
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "value", *extra])
        for i, (key, value) in enumerate(report.scores):
            w.writerow([key, _fmt(value), *(col[i] for col in extra.values())])


def write_histogram_csv(report, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin_left", "bin_right", "count"])
        for left, right, count in zip(report.bin_edges[:-1], report.bin_edges[1:], report.counts):
            w.writerow([_fmt(left), _fmt(right), int(count)])


def write_summary_csv(report, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "mean", "std", "min", "max"])
        w.writerow([report.n, _fmt(report.mean), _fmt(report.std), _fmt(report.min), _fmt(report.max)])


def histogram_svg(report, xlabel="Chamfer distance", ylabel="shapes"):
    """Render the histogram as a standalone 800x500 SVG 1.1 document."""
    width, height = 800, 500
    ml, mr, mt, mb = 70, 20, 40, 60
    pw, ph = width - ml - mr, height - mt - mb
    counts = report.counts
    top = max(int(counts.max()), 1)
    nb = len(counts)
    bar_w = pw / nb
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    if report.title:
        out.append(
            f'<text x="{width / 2:.2f}" y="24" text-anchor="middle" font-family="sans-serif" '
            f'font-size="16">{escape(report.title)}</text>'
        )
    for k, c in enumerate(counts):
        h = ph * int(c) / top
        out.append(
            f'<rect x="{ml + k * bar_w:.3f}" y="{mt + ph - h:.3f}" width="{bar_w:.3f}" '
            f'height="{h:.3f}" fill="#4c72b0" stroke="white" stroke-width="0.5"/>'
        )
    out.append(f'<line x1="{ml}" y1="{mt + ph}" x2="{ml + pw}" y2="{mt + ph}" stroke="black"/>')
    out.append(f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + ph}" stroke="black"/>')
    for frac in (0.0, 0.5, 1.0):
        x = ml + frac * pw
        value = report.bin_edges[0] + frac * (report.bin_edges[-1] - report.bin_edges[0])
        out.append(
            f'<text x="{x:.2f}" y="{mt + ph + 18}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="12">{value:.4g}</text>'
        )
    for frac in (0.0, 0.5, 1.0):
        y = mt + ph - frac * ph
        out.append(
            f'<text x="{ml - 8}" y="{y + 4:.2f}" text-anchor="end" font-family="sans-serif" '
            f'font-size="12">{frac * top:.4g}</text>'
        )
    out.append(
        f'<text x="{ml + pw / 2:.2f}" y="{height - 15}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{escape(xlabel)} (mean {report.mean:.4g}, '
        f'n = {report.n})</text>'
    )
    out.append(
        f'<text x="18" y="{mt + ph / 2:.2f}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="14" transform="rotate(-90 18 {mt + ph / 2:.2f})">{escape(ylabel)}</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_histogram_svg(report, path, **kwargs):
    with open(path, "w", newline="\n") as fh:
        fh.write(histogram_svg(report, **kwargs))
