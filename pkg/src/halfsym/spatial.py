"""Exact nearest-neighbour index over a 3D point cloud.

A k-d tree split at the median of the widest bounding-box axis, with up to
``LEAF_SIZE`` points per leaf. Queries return the closest stored point by
squared Euclidean distance; ties go to the lowest original point index, so
results are identical to an exhaustive scan.

Squared distances are always computed as ``dx*dx + dy*dy + dz*dz`` in that
order, both in the leaves and in the box-distance bound. Rounding is
monotone, so the bound never exceeds the distance of any point inside the
box and pruning cannot lose a tie.
"""

import numpy as np
from numba import njit

from .exceptions import InvalidInputError
from .validation import check_cloud

LEAF_SIZE = 16
_STACK = 128


def _build_tree(points, leaf_size):
    n = points.shape[0]
    perm = np.arange(n)
    lo, hi, left, right, bmin, bmax = [], [], [], [], [], []

    def new_node(a, b):
        lo.append(a)
        hi.append(b)
        left.append(-1)
        right.append(-1)
        seg = points[perm[a:b]]
        bmin.append(seg.min(axis=0))
        bmax.append(seg.max(axis=0))
        return len(lo) - 1

    stack = [new_node(0, n)]
    while stack:
        node = stack.pop()
        a, b = lo[node], hi[node]
        if b - a <= leaf_size:
            continue
        axis = int(np.argmax(bmax[node] - bmin[node]))
        seg = perm[a:b]
        perm[a:b] = seg[np.argsort(points[seg, axis], kind="stable")]
        mid = a + (b - a) // 2
        left[node] = new_node(a, mid)
        right[node] = new_node(mid, b)
        stack.append(right[node])
        stack.append(left[node])

    return (
        perm,
        np.asarray(lo, dtype=np.int64),
        np.asarray(hi, dtype=np.int64),
        np.asarray(left, dtype=np.int64),
        np.asarray(right, dtype=np.int64),
        np.asarray(bmin, dtype=np.float64),
        np.asarray(bmax, dtype=np.float64),
    )


@njit(cache=True, nogil=True)
def _box_dist(q0, q1, q2, bmin, bmax, node):
    d = 0.0
    for ax in range(3):
        q = q0 if ax == 0 else (q1 if ax == 1 else q2)
        lo = bmin[node, ax]
        hi = bmax[node, ax]
        if q < lo:
            e = lo - q
        elif q > hi:
            e = q - hi
        else:
            e = 0.0
        if ax == 0:
            d = e * e
        else:
            d = d + e * e
    return d


@njit(cache=True, nogil=True)
def _query_one(q0, q1, q2, pts, idx, lo, hi, left, right, bmin, bmax, snode, sdist):
    best_d = np.inf
    best_i = -1
    snode[0] = 0
    sdist[0] = _box_dist(q0, q1, q2, bmin, bmax, 0)
    sp = 1
    while sp > 0:
        sp -= 1
        node = snode[sp]
        if sdist[sp] > best_d:
            continue
        if left[node] < 0:
            for k in range(lo[node], hi[node]):
                d0 = q0 - pts[k, 0]
                d1 = q1 - pts[k, 1]
                d2 = q2 - pts[k, 2]
                d = d0 * d0 + d1 * d1 + d2 * d2
                if d < best_d or (d == best_d and idx[k] < best_i):
                    best_d = d
                    best_i = idx[k]
        else:
            l = left[node]
            r = right[node]
            dl = _box_dist(q0, q1, q2, bmin, bmax, l)
            dr = _box_dist(q0, q1, q2, bmin, bmax, r)
            # push the farther child first so the nearer one is popped next
            if dl <= dr:
                snode[sp] = r
                sdist[sp] = dr
                snode[sp + 1] = l
                sdist[sp + 1] = dl
            else:
                snode[sp] = l
                sdist[sp] = dl
                snode[sp + 1] = r
                sdist[sp + 1] = dr
            sp += 2
    return best_i, best_d


@njit(cache=True, nogil=True)
def _query_hinted(q0, q1, q2, pts, lo, hi, left, right, bmin, bmax, snode, sdist, hint):
    """Squared nearest distance, seeded with the stored point at ``hint``.

    Returns the tree position of the nearest point and its distance. A good
    hint (the answer for a nearby query) prunes most of the tree up front.
    """
    d0 = q0 - pts[hint, 0]
    d1 = q1 - pts[hint, 1]
    d2 = q2 - pts[hint, 2]
    best_d = d0 * d0 + d1 * d1 + d2 * d2
    best_k = hint
    snode[0] = 0
    sdist[0] = _box_dist(q0, q1, q2, bmin, bmax, 0)
    sp = 1
    while sp > 0:
        sp -= 1
        node = snode[sp]
        if sdist[sp] > best_d:
            continue
        if left[node] < 0:
            for k in range(lo[node], hi[node]):
                d0 = q0 - pts[k, 0]
                d1 = q1 - pts[k, 1]
                d2 = q2 - pts[k, 2]
                d = d0 * d0 + d1 * d1 + d2 * d2
                if d < best_d:
                    best_d = d
                    best_k = k
        else:
            l = left[node]
            r = right[node]
            dl = _box_dist(q0, q1, q2, bmin, bmax, l)
            dr = _box_dist(q0, q1, q2, bmin, bmax, r)
            near, far, dn, df = (l, r, dl, dr) if dl <= dr else (r, l, dr, dl)
            if df <= best_d:
                snode[sp] = far
                sdist[sp] = df
                sp += 1
            if dn <= best_d:
                snode[sp] = near
                sdist[sp] = dn
                sp += 1
    return best_k, best_d


@njit(cache=True, nogil=True)
def _query_many(queries, pts, idx, lo, hi, left, right, bmin, bmax, out_i, out_d):
    snode = np.empty(_STACK, dtype=np.int64)
    sdist = np.empty(_STACK, dtype=np.float64)
    for j in range(queries.shape[0]):
        i, d = _query_one(
            queries[j, 0], queries[j, 1], queries[j, 2],
            pts, idx, lo, hi, left, right, bmin, bmax, snode, sdist,
        )
        out_i[j] = i
        out_d[j] = d


class NeighborIndex:
    """Immutable exact 1-NN index over ``cloud``.

    >>> index = NeighborIndex([[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
    >>> index.nearest([0.9, 0.0, 0.0])
    (0, 0.81)
    """

    def __init__(self, cloud, leaf_size=LEAF_SIZE):
        points = check_cloud(cloud)
        if leaf_size < 1:
            raise InvalidInputError("leaf_size must be >= 1")
        perm, lo, hi, left, right, bmin, bmax = _build_tree(points, leaf_size)
        self._pts = np.ascontiguousarray(points[perm])
        self._idx = perm.astype(np.int64)
        self._tree = (lo, hi, left, right, bmin, bmax)
        for arr in (self._pts, self._idx, *self._tree):
            arr.setflags(write=False)
        self.n_points = points.shape[0]
        self.bounds = (bmin[0].copy(), bmax[0].copy())

    def __len__(self):
        return self.n_points

    def query(self, queries):
        """Nearest stored point for each row of ``queries``.

        Returns ``(indices, squared_distances)`` arrays.
        """
        q = check_cloud(queries, allow_empty=True, name="queries")
        out_i = np.empty(q.shape[0], dtype=np.int64)
        out_d = np.empty(q.shape[0], dtype=np.float64)
        _query_many(q, self._pts, self._idx, *self._tree, out_i, out_d)
        return out_i, out_d

    def nearest(self, point):
        """``(point_index, squared_distance)`` of the closest stored point."""
        i, d = self.query(np.asarray(point, dtype=np.float64).reshape(1, 3))
        return int(i[0]), float(d[0])


def build_index(cloud, leaf_size=LEAF_SIZE):
    return NeighborIndex(cloud, leaf_size=leaf_size)


def nearest(index, query):
    return index.nearest(query)
