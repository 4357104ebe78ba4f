"""Earth Mover's Distance between equal-size point clouds.

EMD is the smallest mean (unsquared) Euclidean distance over all bijections
between the two clouds. ``emd_exact`` solves the assignment problem
directly; ``emd_approx`` anneals an entropic transport plan, rounds it to a
matching and stops once a dual lower bound certifies the requested
relative gap.
"""

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from ..exceptions import ConvergenceError, InvalidInputError, TooLargeError
from ..validation import check_cloud

EXACT_MAX_POINTS = 1024


def _pair(s1, s2):
    a = check_cloud(s1, name="s1")
    b = check_cloud(s2, name="s2")
    if a.shape[0] != b.shape[0]:
        raise InvalidInputError(
            f"EMD needs equal-size clouds, got {a.shape[0]} and {b.shape[0]}"
        )
    return a, b


def emd_exact(s1, s2, max_points=EXACT_MAX_POINTS, return_matching=False):
    """Exact EMD via a shortest-augmenting-path assignment solver.

    With ``return_matching`` the column index matched to each row of ``s1``
    is returned as well.
    """
    a, b = _pair(s1, s2)
    n = a.shape[0]
    if n > max_points:
        raise TooLargeError(
            f"emd_exact is capped at {max_points} points (got {n}); use emd_approx"
        )
    cost = cdist(a, b)
    rows, cols = linear_sum_assignment(cost)
    value = float(cost[rows, cols].mean())
    if return_matching:
        return value, cols
    return value


def _lse_rows(x):
    m = x.max(axis=1)
    return np.log(np.exp(x - m[:, None]).sum(axis=1)) + m


def _round_to_matching(score):
    """Greedy permutation from a plan's log-weights (higher is better)."""
    n = score.shape[0]
    cols = score.argmax(axis=1)
    if np.unique(cols).size == n:
        return cols
    taken = np.zeros(n, dtype=bool)
    out = np.empty(n, dtype=np.int64)
    # most confident rows choose first
    order = np.argsort(-score.max(axis=1), kind="stable")
    for row in order:
        r = np.where(taken, -np.inf, score[row])
        c = int(r.argmax())
        out[row] = c
        taken[c] = True
    return out


def _dual_bound(cost, f):
    """Feasible dual (double c-transform of ``f``) and its objective."""
    g = (cost - f[:, None]).min(axis=0)
    f = (cost - g[None, :]).min(axis=1)
    return f, g, float(f.mean() + g.mean())


def emd_approx(s1, s2, tolerance=0.01, max_iter=20000, eps_decay=0.5, return_bounds=False):
    """Approximate EMD with a certified relative error of at most ``tolerance``.

    Returns the cost of an actual matching (an upper bound on the exact
    EMD) once ``upper - lower <= tolerance * lower`` for a dual lower bound.
    Raises ConvergenceError with the achieved gap if ``max_iter`` Sinkhorn
    sweeps are not enough.
    """
    if not tolerance > 0:
        raise InvalidInputError("tolerance must be positive")
    a, b = _pair(s1, s2)
    n = a.shape[0]
    cost = cdist(a, b)
    scale = float(cost.max())
    if scale == 0.0:
        return (0.0, 0.0, 0.0) if return_bounds else 0.0
    c = cost / scale
    c_t = np.ascontiguousarray(c.T)
    log_n = np.log(n)
    f = np.zeros(n)
    g = np.zeros(n)
    eps = 0.5
    sweeps = 0
    upper = np.inf
    gap = np.inf
    while sweeps < max_iter:
        # loose inner solve: the dual certificate below guards the result
        for it in range(1000):
            f = -eps * (_lse_rows((g[None, :] - c) / eps) + log_n)
            g = -eps * (_lse_rows((f[None, :] - c_t) / eps) + log_n)
            sweeps += 1
            if sweeps >= max_iter:
                break
            if it % 5 == 4:
                with np.errstate(over="ignore"):
                    row_mass = np.exp(_lse_rows((f[:, None] + g[None, :] - c) / eps))
                if np.abs(row_mass * n - 1.0).mean() < 1e-2:
                    break
        cols = _round_to_matching((f[:, None] + g[None, :] - c) / eps)
        upper = min(upper, float(cost[np.arange(n), cols].mean()))
        _, _, lower = _dual_bound(c, f)
        lower = max(lower, 0.0) * scale
        gap = (upper - lower) / upper if upper > 0 else 0.0
        if upper - lower <= tolerance * lower or upper == 0.0:
            return (upper, lower, gap) if return_bounds else upper
        # warm start: re-centre the potentials on the feasible dual
        f, g, _ = _dual_bound(c, f)
        eps *= eps_decay
        if eps < 1e-12:
            break
    raise ConvergenceError(
        f"emd_approx did not reach relative gap {tolerance} (achieved {gap:.3g})", gap
    )
