"""Input validation helpers shared by the functional API and the estimators."""

import numpy as np

from .exceptions import InvalidInputError


def check_cloud(cloud, *, allow_empty=False, name="cloud"):
    """Return ``cloud`` as a C-contiguous float64 array of shape (N, 3).

    Raises InvalidInputError for wrong shape, non-finite coordinates, or an
    empty cloud (unless ``allow_empty``).
    """
    try:
        arr = np.asarray(cloud, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"{name}: cannot convert to a float array ({exc})") from None
    if arr.ndim == 1 and arr.size == 0 and allow_empty:
        return np.empty((0, 3))
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise InvalidInputError(f"{name}: expected shape (N, 3), got {arr.shape}")
    if arr.shape[0] == 0 and not allow_empty:
        raise InvalidInputError(f"{name}: point cloud is empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name}: contains NaN or Inf coordinates")
    return np.ascontiguousarray(arr)


def check_cloud_set(clouds, *, name="clouds", same_size=False):
    """Validate a non-empty sequence of clouds; returns a list of arrays."""
    if isinstance(clouds, np.ndarray) and clouds.ndim == 3:
        clouds = list(clouds)
    out = [check_cloud(c, name=f"{name}[{i}]") for i, c in enumerate(clouds)]
    if not out:
        raise InvalidInputError(f"{name}: empty set of point clouds")
    if same_size:
        sizes = {c.shape[0] for c in out}
        if len(sizes) > 1:
            raise InvalidInputError(
                f"{name}: clouds must share one resolution, got sizes {sorted(sizes)}"
            )
    return out


def check_vector3(v, name="vector"):
    arr = np.asarray(v, dtype=np.float64).reshape(-1)
    if arr.shape != (3,):
        raise InvalidInputError(f"{name}: expected 3 components, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name}: contains NaN or Inf")
    return arr


def check_random_state(seed):
    """Turn ``seed`` into a ``numpy.random.Generator``."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
