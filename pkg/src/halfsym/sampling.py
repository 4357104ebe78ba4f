"""Farthest point sampling."""

import numpy as np

from .exceptions import InvalidInputError
from .validation import check_cloud, check_random_state


def farthest_point_indices(cloud, k, start=0, random_state=None):
    """Indices of ``k`` points chosen by greedy maximin, in selection order.

    Each step picks the point whose minimum squared distance to the points
    already chosen is largest; ``argmax`` returns the first maximum, so ties
    go to the lowest index. ``start=None`` draws the seed point from
    ``random_state``.
    """
    pts = check_cloud(cloud)
    n = pts.shape[0]
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool):
        raise InvalidInputError(f"k must be an integer, got {k!r}")
    if k < 1 or k > n:
        raise InvalidInputError(f"k must satisfy 1 <= k <= {n}, got {k}")
    if start is None:
        start = int(check_random_state(random_state).integers(n))
    if not 0 <= start < n:
        raise InvalidInputError(f"start must satisfy 0 <= start < {n}, got {start}")

    selected = np.empty(k, dtype=np.int64)
    selected[0] = start
    min_d = np.full(n, np.inf)
    last = start
    for i in range(1, k):
        diff = pts - pts[last]
        d = diff[:, 0] * diff[:, 0] + diff[:, 1] * diff[:, 1] + diff[:, 2] * diff[:, 2]
        np.minimum(min_d, d, out=min_d)
        # already-selected points sit at distance 0 and never win unless all do
        min_d[last] = -1.0
        last = int(np.argmax(min_d))
        selected[i] = last
    return selected


def farthest_point_sample(cloud, k, start=0, random_state=None):
    """The subset of ``cloud`` picked by :func:`farthest_point_indices`."""
    pts = check_cloud(cloud)
    return pts[farthest_point_indices(pts, k, start=start, random_state=random_state)]
