"""Chamfer distance and reflection-symmetry score.

    CD(S1, S2) = mean_{x in S1} min_{y in S2} |x - y|^2
               + mean_{y in S2} min_{x in S1} |x - y|^2
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from ..geometry import X0_PLANE, Plane, make_reflection, reflect_cloud
from ..spatial import _STACK, LEAF_SIZE, NeighborIndex, _build_tree, _query_hinted
from ..validation import check_cloud, check_cloud_set


def chamfer_distance(s1, s2):
    """Two-sided mean of squared nearest-neighbour distances (kd-tree backed)."""
    a = check_cloud(s1, name="s1")
    b = check_cloud(s2, name="s2")
    _, d_ab = NeighborIndex(b).query(a)
    _, d_ba = NeighborIndex(a).query(b)
    return float(d_ab.mean()) + float(d_ba.mean())


@dataclass(frozen=True)
class SymmetryScore:
    value: float
    plane: Plane

    def __float__(self):
        return self.value


def symmetry_score(cloud, plane=X0_PLANE):
    """Chamfer distance between ``cloud`` and its mirror image about ``plane``."""
    pts = check_cloud(cloud)
    mirrored = reflect_cloud(pts, make_reflection(plane))
    return SymmetryScore(chamfer_distance(pts, mirrored), plane)


class StackedTrees:
    """k-d trees for many clouds of one resolution, packed into flat arrays.

    Tree topology depends only on the point count, so every cloud shares the
    node ranges and child links; only the point order and boxes differ.
    """

    def __init__(self, clouds):
        clouds = check_cloud_set(clouds, same_size=True)
        pts, bmin, bmax = [], [], []
        for c in clouds:
            perm, lo, hi, left, right, lo_box, hi_box = _build_tree(c, LEAF_SIZE)
            pts.append(c[perm])
            bmin.append(lo_box)
            bmax.append(hi_box)
        self.pts = np.ascontiguousarray(np.stack(pts))
        self.bmin = np.ascontiguousarray(np.stack(bmin))
        self.bmax = np.ascontiguousarray(np.stack(bmax))
        self.lo, self.hi, self.left, self.right = lo, hi, left, right

    def __len__(self):
        return self.pts.shape[0]

    def args(self):
        return (self.pts, self.lo, self.hi, self.left, self.right, self.bmin, self.bmax)


@njit(cache=True, nogil=True)
def _cd_bounded(i, j, bound, pts, lo, hi, left, right, bmin, bmax, snode, sdist):
    """CD between clouds i and j, or inf once it provably exceeds ``bound``.

    Both directional sums only grow, so their running total is an exact
    lower bound on the final value. Queries walk each cloud in tree order,
    so consecutive queries are close and the previous answer is a good hint.
    """
    n = pts.shape[1]
    s_i = 0.0
    s_j = 0.0
    h_i = 0
    h_j = 0
    for k in range(n):
        h_i, d = _query_hinted(
            pts[i, k, 0], pts[i, k, 1], pts[i, k, 2],
            pts[j], lo, hi, left, right, bmin[j], bmax[j], snode, sdist, h_i,
        )
        s_i += d
        h_j, d = _query_hinted(
            pts[j, k, 0], pts[j, k, 1], pts[j, k, 2],
            pts[i], lo, hi, left, right, bmin[i], bmax[i], snode, sdist, h_j,
        )
        s_j += d
        if s_i / n + s_j / n > bound:
            return np.inf
    return s_i / n + s_j / n


@njit(cache=True)
def _pairwise_matrix(pts, lo, hi, left, right, bmin, bmax):
    m = pts.shape[0]
    out = np.zeros((m, m))
    snode = np.empty(_STACK, dtype=np.int64)
    sdist = np.empty(_STACK, dtype=np.float64)
    for i in range(m):
        for j in range(i + 1, m):
            d = _cd_bounded(i, j, np.inf, pts, lo, hi, left, right, bmin, bmax, snode, sdist)
            out[i, j] = d
            out[j, i] = d
    return out


def pairwise_chamfer(clouds):
    """Full symmetric matrix of Chamfer distances between equal-size clouds."""
    trees = StackedTrees(clouds)
    return _pairwise_matrix(*trees.args())
