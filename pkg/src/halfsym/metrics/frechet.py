"""Fréchet distance between Gaussian fits of two feature sets."""

import warnings
from dataclasses import dataclass

import numpy as np

from ..exceptions import InvalidInputError


@dataclass(frozen=True)
class GaussianSummary:
    mean: np.ndarray
    covariance: np.ndarray
    n_samples: int

    @classmethod
    def fit(cls, features):
        """Sample mean and unbiased covariance of the rows of ``features``."""
        x = np.asarray(features, dtype=np.float64)
        if x.ndim != 2 or x.shape[0] == 0:
            raise InvalidInputError(f"features must be a non-empty 2-D array, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise InvalidInputError("features contain NaN or Inf")
        n, d = x.shape
        if n < d + 1:
            warnings.warn(
                f"only {n} samples for {d} features; the covariance is rank deficient",
                RuntimeWarning,
                stacklevel=3,
            )
        mean = x.mean(axis=0)
        if n > 1:
            cov = np.cov(x, rowvar=False, ddof=1).reshape(d, d)
        else:
            cov = np.zeros((d, d))
        cov = 0.5 * (cov + cov.T)
        return cls(mean, cov, n)


def _sqrtm_psd(a):
    """Square root of a symmetric PSD matrix; negative eigenvalues clamp to 0."""
    w, v = np.linalg.eigh(0.5 * (a + a.T))
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T


def frechet_from_summaries(s1, s2):
    if s1.mean.shape != s2.mean.shape:
        raise InvalidInputError(
            f"feature dimension mismatch: {s1.mean.shape[0]} vs {s2.mean.shape[0]}"
        )
    diff = s1.mean - s2.mean
    root1 = _sqrtm_psd(s1.covariance)
    # Tr((S1 S2)^1/2) = Tr((S1^1/2 S2 S1^1/2)^1/2), and the latter is symmetric
    inner = root1 @ s2.covariance @ root1
    w = np.linalg.eigvalsh(0.5 * (inner + inner.T))
    tr_cross = np.sqrt(np.clip(w, 0.0, None)).sum()
    value = diff @ diff + np.trace(s1.covariance) + np.trace(s2.covariance) - 2.0 * tr_cross
    return max(float(value), 0.0)


def frechet_point_distance(f1, f2):
    """FPD between two sets of feature vectors (rows are shapes)."""
    a = np.asarray(f1, dtype=np.float64)
    b = np.asarray(f2, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2:
        raise InvalidInputError("feature sets must be 2-D (n_shapes, n_features)")
    if a.shape[1] != b.shape[1]:
        raise InvalidInputError(f"feature dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    return frechet_from_summaries(GaussianSummary.fit(a), GaussianSummary.fit(b))
