"""Leave-one-out 1-nearest-neighbour accuracy between two sets of shapes.

Every shape in the union of the generated and reference sets is assigned
the label of its nearest other shape. The returned accuracy is the
fraction assigned correctly; 0.5 means the sets cannot be told apart.
A shape whose nearest same-set and nearest other-set distances are exactly
equal counts as misclassified.
"""

from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed
from numba import njit

from ..exceptions import InvalidInputError
from ..spatial import _STACK
from ..validation import check_cloud_set
from .chamfer import StackedTrees, _cd_bounded, pairwise_chamfer
from .emd import EXACT_MAX_POINTS, emd_approx, emd_exact

DISTANCES = ("cd", "emd")


@dataclass(frozen=True)
class NNAResult:
    accuracy: float
    accuracy_generated: float
    accuracy_reference: float
    n_generated: int
    n_reference: int
    distance: str
    nearest: np.ndarray
    nearest_distance: np.ndarray
    correct: np.ndarray
    ties: int

    def __float__(self):
        return self.accuracy


def _classify(best, arg, n_generated, distance):
    same, other = best[:, 0], best[:, 1]
    correct = same < other
    nearest = np.where(correct, arg[:, 0], arg[:, 1])
    m = best.shape[0]
    return NNAResult(
        accuracy=float(correct.sum() / m),
        accuracy_generated=float(correct[:n_generated].mean()),
        accuracy_reference=float(correct[n_generated:].mean()),
        n_generated=n_generated,
        n_reference=m - n_generated,
        distance=distance,
        nearest=nearest,
        nearest_distance=np.minimum(same, other),
        correct=correct,
        ties=int((same == other).sum()),
    )


def _labels(n_generated, m):
    if n_generated < 1 or n_generated >= m:
        raise InvalidInputError("both the generated and the reference set must be non-empty")
    labels = np.ones(m, dtype=np.int64)
    labels[:n_generated] = 0
    return labels


def nna_from_matrix(distances, n_generated, distance="precomputed"):
    """1-NNA from a full (m, m) distance matrix over [generated; reference]."""
    d = np.array(distances, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise InvalidInputError(f"expected a square distance matrix, got {d.shape}")
    m = d.shape[0]
    if m < 2:
        raise InvalidInputError("1-NNA needs at least two shapes in the union")
    labels = _labels(n_generated, m)
    np.fill_diagonal(d, np.inf)
    same = labels[:, None] == labels[None, :]
    best = np.empty((m, 2))
    arg = np.empty((m, 2), dtype=np.int64)
    for g, mask in enumerate((same, ~same)):
        masked = np.where(mask, d, np.inf)
        arg[:, g] = masked.argmin(axis=1)
        best[:, g] = masked[np.arange(m), arg[:, g]]
    return _classify(best, arg, n_generated, distance)


@njit(cache=True)
def _update(best, arg, i, j, g, d):
    if d < best[i, g] or (d == best[i, g] and j < arg[i, g]):
        best[i, g] = d
        arg[i, g] = j


@njit(cache=True)
def _nearest_by_group(pts, lo, hi, left, right, bmin, bmax, labels, order):
    """Nearest same-group and other-group neighbour of every shape.

    A pair is abandoned once its CD exceeds the smaller of the two groups'
    current bests at both ends, since it can then be nobody's overall
    nearest. The overall nearest, its distance and the correctness flag are
    exact; the best of the losing group may be an over-estimate (or inf),
    but it is only ever compared against the winner.
    """
    m = pts.shape[0]
    best = np.full((m, 2), np.inf)
    arg = np.full((m, 2), -1, dtype=np.int64)
    done = np.zeros((m, m), dtype=np.bool_)
    snode = np.empty(_STACK, dtype=np.int64)
    sdist = np.empty(_STACK, dtype=np.float64)
    # seed both groups with the closest candidate under the visit order
    for i in range(m):
        seen = np.zeros(2, dtype=np.bool_)
        for jj in range(m):
            j = order[i, jj]
            if j == i:
                continue
            g = 0 if labels[i] == labels[j] else 1
            if seen[g]:
                if seen[1 - g]:
                    break
                continue
            seen[g] = True
            if done[i, j]:
                continue
            bound = min(best[i, 0], best[i, 1])
            d = _cd_bounded(i, j, bound, pts, lo, hi, left, right, bmin, bmax, snode, sdist)
            if d < np.inf:
                done[i, j] = True
                done[j, i] = True
                _update(best, arg, i, j, g, d)
                _update(best, arg, j, i, g, d)
    for i in range(m):
        for jj in range(m):
            j = order[i, jj]
            if j == i or done[i, j]:
                continue
            done[i, j] = True
            done[j, i] = True
            g = 0 if labels[i] == labels[j] else 1
            bound = max(min(best[i, 0], best[i, 1]), min(best[j, 0], best[j, 1]))
            d = _cd_bounded(i, j, bound, pts, lo, hi, left, right, bmin, bmax, snode, sdist)
            _update(best, arg, i, j, g, d)
            _update(best, arg, j, i, g, d)
    return best, arg


def _visit_order(clouds):
    """Per-shape candidate order, closest first under a cheap moment proxy.

    Only affects how early pairs can be abandoned, never the result.
    """
    desc = []
    for c in clouds:
        centered = c - c.mean(axis=0)
        cov = centered.T @ centered / c.shape[0]
        desc.append(np.concatenate([c.mean(axis=0), cov[np.triu_indices(3)]]))
    desc = np.asarray(desc)
    sq = ((desc[:, None, :] - desc[None, :, :]) ** 2).sum(axis=-1)
    return np.argsort(sq, axis=1, kind="stable")


def _chamfer_nna(clouds, n_generated):
    labels = _labels(n_generated, len(clouds))
    trees = StackedTrees(clouds)
    best, arg = _nearest_by_group(*trees.args(), labels, _visit_order(clouds))
    return _classify(best, arg, n_generated, "cd")


def emd_distance(a, b, tolerance=0.01, max_exact=EXACT_MAX_POINTS):
    """Exact EMD up to ``max_exact`` points, certified approximation above."""
    if len(a) <= max_exact:
        return emd_exact(a, b, max_points=max_exact)
    return emd_approx(a, b, tolerance=tolerance)


def pairwise_emd(clouds, tolerance=0.01, n_jobs=1):
    clouds = check_cloud_set(clouds, same_size=True)
    m = len(clouds)
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    values = Parallel(n_jobs=n_jobs)(
        delayed(emd_distance)(clouds[i], clouds[j], tolerance) for i, j in pairs
    )
    out = np.zeros((m, m))
    for (i, j), v in zip(pairs, values):
        out[i, j] = out[j, i] = v
    return out


def pairwise_distances(clouds, distance="cd", emd_tolerance=0.01, n_jobs=1):
    """Full distance matrix between equal-size clouds under CD or EMD."""
    if distance == "cd":
        return pairwise_chamfer(clouds)
    if distance == "emd":
        return pairwise_emd(clouds, tolerance=emd_tolerance, n_jobs=n_jobs)
    raise InvalidInputError(f"distance must be one of {DISTANCES}, got {distance!r}")


def one_nn_accuracy(
    generated, reference, distance="cd", emd_tolerance=0.01, n_jobs=1, return_details=False
):
    """1-NNA of ``generated`` against ``reference`` under CD or EMD.

    Returns the accuracy in [0, 1], or an :class:`NNAResult` with the
    per-shape nearest neighbours when ``return_details`` is set.
    """
    gen = check_cloud_set(generated, name="generated")
    ref = check_cloud_set(reference, name="reference")
    union = gen + ref
    if len(union) < 2:
        raise InvalidInputError("1-NNA needs at least two shapes in the union")
    check_cloud_set(union, name="generated+reference", same_size=True)
    if distance == "cd":
        result = _chamfer_nna(union, len(gen))
    elif distance == "emd":
        d = pairwise_emd(union, tolerance=emd_tolerance, n_jobs=n_jobs)
        result = nna_from_matrix(d, len(gen), distance="emd")
    else:
        raise InvalidInputError(f"distance must be one of {DISTANCES}, got {distance!r}")
    return result if return_details else result.accuracy
