"""scikit-learn compatible wrappers around the functional API.

``X`` is always a sequence of point clouds (each an (N, 3) array), so the
transformers compose in a :class:`sklearn.pipeline.Pipeline`::

    pipe = make_pipeline(
        MirrorReconstructor(),
        Denormalizer(mean=mu, scale=sigma),
        FarthestPointSampler(n_points=2048),
    )
    full_shapes = pipe.fit_transform(generated_halves)
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .dataset.prep import compute_normalization, denormalize, normalize
from .geometry import X0_PLANE, make_half_object, reconstruct_full
from .metrics.chamfer import symmetry_score
from .metrics.features import MomentFeatures, extract_features
from .metrics.frechet import GaussianSummary, frechet_from_summaries
from .metrics.nna import one_nn_accuracy
from .metrics.report import DEFAULT_BINS, build_report
from .sampling import farthest_point_sample
from .validation import check_cloud_set, check_random_state


class _StatelessTransformer(TransformerMixin, BaseEstimator):
    def fit(self, X, y=None):
        self.n_shapes_seen_ = len(check_cloud_set(X))
        return self

    def __sklearn_is_fitted__(self):
        return True


class HalfObjectTransformer(_StatelessTransformer):
    """Mirror each shape's x <= 0 half onto x >= 0."""

    def __init__(self, dedup_boundary=False):
        self.dedup_boundary = dedup_boundary

    def transform(self, X):
        return [make_half_object(c, self.dedup_boundary) for c in check_cloud_set(X)]


class MirrorReconstructor(_StatelessTransformer):
    """Append each shape's mirror image about ``plane`` (default x = 0)."""

    def __init__(self, plane=None):
        self.plane = plane

    def transform(self, X):
        plane = self.plane if self.plane is not None else X0_PLANE
        return [reconstruct_full(c, plane) for c in check_cloud_set(X)]


class FarthestPointSampler(_StatelessTransformer):
    """Downsample every shape to ``n_points`` by farthest point sampling.

    ``start=None`` draws each seed point from ``random_state``.
    """

    def __init__(self, n_points=2048, start=0, random_state=None):
        self.n_points = n_points
        self.start = start
        self.random_state = random_state

    def transform(self, X):
        rng = check_random_state(self.random_state)
        return [
            farthest_point_sample(c, self.n_points, start=self.start, random_state=rng)
            for c in check_cloud_set(X)
        ]


class ShapeNormalizer(TransformerMixin, BaseEstimator):
    """Learn a pooled mean / scalar scale over a shape set and apply it.

    ``inverse_transform`` maps back with ``x * scale + mean`` (or
    ``x * scale - mean`` when ``mode="paper-literal"``).
    """

    def __init__(self, mode="default"):
        self.mode = mode

    def fit(self, X, y=None):
        self.mean_, self.scale_ = compute_normalization(check_cloud_set(X))
        return self

    def transform(self, X):
        check_is_fitted(self)
        return [normalize(c, self.mean_, self.scale_) for c in check_cloud_set(X)]

    def inverse_transform(self, X):
        check_is_fitted(self)
        return [denormalize(c, self.mean_, self.scale_, self.mode) for c in check_cloud_set(X)]


class Denormalizer(_StatelessTransformer):
    """Apply fixed, externally supplied normalization statistics in reverse."""

    def __init__(self, mean=(0.0, 0.0, 0.0), scale=1.0, mode="default"):
        self.mean = mean
        self.scale = scale
        self.mode = mode

    def transform(self, X):
        return [denormalize(c, self.mean, self.scale, self.mode) for c in check_cloud_set(X)]


class SymmetryScorer(TransformerMixin, BaseEstimator):
    """Reflection-symmetry score (CD to the mirror image) per shape.

    ``transform`` returns an (n_shapes, 1) array; ``fit`` additionally
    stores a histogram report of the fitted set in ``report_``.
    """

    def __init__(self, plane=None, bins=DEFAULT_BINS):
        self.plane = plane
        self.bins = bins

    def _scores(self, X):
        plane = self.plane if self.plane is not None else X0_PLANE
        return np.array([symmetry_score(c, plane).value for c in check_cloud_set(X)])

    def fit(self, X, y=None, ids=None):
        scores = self._scores(X)
        ids = ids if ids is not None else [str(i) for i in range(len(scores))]
        self.report_ = build_report(zip(ids, scores), bins=self.bins)
        return self

    def transform(self, X):
        return self._scores(X)[:, None]

    def __sklearn_is_fitted__(self):
        return True


class FrechetPointDistance(BaseEstimator):
    """FPD against a fitted reference set. Lower is better.

    ``extractor`` is any callable ``(cloud, shape_id=None) -> vector``;
    the default is :class:`MomentFeatures`.
    """

    def __init__(self, extractor=None):
        self.extractor = extractor

    def _extractor(self):
        return self.extractor if self.extractor is not None else MomentFeatures()

    def transform(self, X, ids=None):
        clouds = check_cloud_set(X)
        ids = ids if ids is not None else [None] * len(clouds)
        ex = self._extractor()
        return np.array([extract_features(c, ex, shape_id=i) for c, i in zip(clouds, ids)])

    def fit(self, X, y=None, ids=None):
        feats = self.transform(X, ids)
        self.reference_ = GaussianSummary.fit(feats)
        self.n_features_in_ = feats.shape[1]
        return self

    def score(self, X, y=None, ids=None):
        check_is_fitted(self)
        return frechet_from_summaries(GaussianSummary.fit(self.transform(X, ids)), self.reference_)


class OneNNAccuracy(BaseEstimator):
    """1-NNA of generated shapes against a fitted reference set (0.5 is ideal)."""

    def __init__(self, distance="cd", emd_tolerance=0.01, n_jobs=1):
        self.distance = distance
        self.emd_tolerance = emd_tolerance
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        self.reference_ = check_cloud_set(X, same_size=True)
        return self

    def score(self, X, y=None):
        check_is_fitted(self)
        return one_nn_accuracy(
            X, self.reference_, distance=self.distance,
            emd_tolerance=self.emd_tolerance, n_jobs=self.n_jobs,
        )
