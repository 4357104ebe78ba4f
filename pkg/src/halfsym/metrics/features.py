"""Per-shape feature extractors for the Fréchet point-cloud distance.

``MomentFeatures`` is a fixed 63-dimensional geometric descriptor; it is a
stand-in for a learned network and its FPD values are not comparable with
those computed on network features. ``FeatureTable`` binds precomputed
features (e.g. from any network) stored in a CSV keyed by shape id.
"""

import csv
from itertools import combinations_with_replacement
from pathlib import Path

import numpy as np

from ..exceptions import InvalidInputError, MissingFeatureError, ParseError
from ..validation import check_cloud

RADIAL_BINS = 16
_TINY = 1e-12

# (i, j) and (i, j, k) index tuples for the centered monomials
_SECOND = list(combinations_with_replacement(range(3), 2))
_THIRD = list(combinations_with_replacement(range(3), 3))


class MomentFeatures:
    """Deterministic 63-d geometric-moment descriptor.

    Layout: centroid (3), centered second moments (6), centered third
    moments (10), radial-distance histogram (16), per-axis extent stats
    (12: min, max, std, mean |x| of centered coords), and PCA spectrum
    descriptors (16). Everything except the centroid is translation
    invariant.
    """

    label = "geometric-moments-63"
    n_features = 63

    def __call__(self, cloud, shape_id=None):
        pts = check_cloud(cloud)
        centroid = pts.mean(axis=0)
        c = pts - centroid

        second = np.array([np.mean(c[:, i] * c[:, j]) for i, j in _SECOND])
        third = np.array([np.mean(c[:, i] * c[:, j] * c[:, k]) for i, j, k in _THIRD])

        r = np.sqrt(np.einsum("ij,ij->i", c, c))
        r_max = r.max()
        if r_max > 0:
            hist, _ = np.histogram(r / r_max, bins=RADIAL_BINS, range=(0.0, 1.0))
        else:
            hist = np.zeros(RADIAL_BINS)
            hist[0] = pts.shape[0]
        radial = hist / pts.shape[0]

        extent = np.concatenate(
            [[c[:, a].min(), c[:, a].max(), c[:, a].std(), np.abs(c[:, a]).mean()] for a in range(3)]
        )

        cov = c.T @ c / pts.shape[0]
        lam = np.clip(np.linalg.eigvalsh(cov)[::-1], 0.0, None)
        total = lam.sum()
        p = lam / total if total > _TINY else np.zeros(3)
        l1 = lam[0] if lam[0] > _TINY else np.inf
        nz = p[p > 0]
        pca = np.concatenate(
            [
                lam,
                np.sqrt(lam),
                p,
                [
                    (lam[0] - lam[1]) / l1,  # linearity
                    (lam[1] - lam[2]) / l1,  # planarity
                    lam[2] / l1,  # sphericity
                    (lam[0] - lam[2]) / l1,  # anisotropy
                    np.cbrt(lam[0] * lam[1] * lam[2]),  # omnivariance
                    float(-(nz * np.log(nz)).sum()),  # eigenentropy
                    lam[1] / l1,
                ],
            ]
        )
        out = np.concatenate([centroid, second, third, radial, extent, pca])
        return out


class FeatureTable:
    """Precomputed features keyed by shape id, read from ``id,f0,...,f{D-1}`` CSV."""

    def __init__(self, features, label="external"):
        self._features = {str(k): np.asarray(v, dtype=np.float64) for k, v in features.items()}
        dims = {v.shape for v in self._features.values()}
        if len(dims) > 1:
            raise InvalidInputError(f"feature rows have differing shapes: {sorted(dims)}")
        self.n_features = dims.pop()[0] if dims else 0
        self.label = label

    @classmethod
    def from_csv(cls, path):
        path = Path(path)
        raw = path.read_bytes()
        text = raw.decode("utf-8")
        lines = text.splitlines(keepends=True)
        if not lines:
            raise ParseError("empty feature table", offset=0, path=path)
        header = next(csv.reader([lines[0]]))
        if header[0] != "id" or any(h != f"f{i}" for i, h in enumerate(header[1:])):
            raise ParseError("feature table header must be id,f0,...,f{D-1}", offset=0, path=path)
        d = len(header) - 1
        features = {}
        offset = len(lines[0].encode("utf-8"))
        for line in lines[1:]:
            if line.strip():
                row = next(csv.reader([line]))
                try:
                    values = [float(v) for v in row[1:]]
                except ValueError:
                    raise ParseError("non-numeric feature value", offset=offset, path=path) from None
                if len(values) != d:
                    raise ParseError(f"expected {d} features, got {len(values)}", offset=offset, path=path)
                if row[0] in features:
                    raise ParseError(f"duplicate shape id {row[0]!r}", offset=offset, path=path)
                features[row[0]] = values
            offset += len(line.encode("utf-8"))
        return cls(features, label=f"external:{path.name}")

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["id"] + [f"f{i}" for i in range(self.n_features)])
            for key in sorted(self._features):
                w.writerow([key] + [repr(float(v)) for v in self._features[key]])

    def __contains__(self, shape_id):
        return str(shape_id) in self._features

    def __call__(self, cloud=None, shape_id=None):
        if shape_id is None:
            raise MissingFeatureError("external features need a shape id")
        try:
            return self._features[str(shape_id)].copy()
        except KeyError:
            raise MissingFeatureError(f"no features for shape id {shape_id!r}") from None


def extract_features(cloud, extractor=None, shape_id=None):
    """Feature vector for one cloud; defaults to :class:`MomentFeatures`."""
    if extractor is None:
        extractor = MomentFeatures()
    out = np.asarray(extractor(cloud, shape_id=shape_id), dtype=np.float64)
    if not np.all(np.isfinite(out)):
        raise InvalidInputError("extracted features contain NaN or Inf")
    return out
