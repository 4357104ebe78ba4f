"""Planes, Householder reflections and half-shape mirroring.

A point cloud is a float64 array of shape (N, 3). Reflections about an
arbitrary plane with unit normal ``n`` through point ``m`` use the pair

    A = I - 2 n n^T,   t = 2 n n^T m,   R(p) = A p + t.

The x = 0 plane is special-cased as an exact sign flip of the x column so
that reflecting twice gives back the input bit for bit.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .exceptions import InvalidPlaneError
from .validation import check_cloud, check_vector3

UNIT_TOL = 1e-12


@dataclass(frozen=True)
class Plane:
    """Reflection plane given by a unit ``normal`` and a ``point`` on it."""

    normal: np.ndarray
    point: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "normal", check_vector3(self.normal, "plane normal"))
        object.__setattr__(self, "point", check_vector3(self.point, "plane point"))

    @classmethod
    def from_normal(cls, normal, point=(0.0, 0.0, 0.0)):
        """Build a plane, rescaling ``normal`` to unit length."""
        n = check_vector3(normal, "plane normal")
        norm = np.linalg.norm(n)
        if norm == 0.0:
            raise InvalidPlaneError("plane normal must be non-zero")
        return cls(n / norm, point)

    @classmethod
    def parse(cls, text):
        """Parse ``"nx,ny,nz,px,py,pz"`` (normal is normalized)."""
        try:
            values = [float(v) for v in text.split(",")]
        except ValueError:
            raise InvalidPlaneError(f"cannot parse plane spec {text!r}") from None
        if len(values) != 6:
            raise InvalidPlaneError(
                f"plane spec needs 6 comma-separated numbers, got {len(values)}"
            )
        return cls.from_normal(values[:3], values[3:])

    @property
    def offset(self):
        """Signed offset d with n.x + d = 0 on the plane (d = -n.m)."""
        return -float(self.normal @ self.point)

    @property
    def is_x0(self):
        """True for the plane x = 0 (normal +-e_x through a point with x = 0)."""
        n = self.normal
        return abs(n[0]) == 1.0 and n[1] == 0.0 and n[2] == 0.0 and self.point[0] == 0.0

    def signed_distance(self, cloud):
        pts = check_cloud(cloud, allow_empty=True)
        return (pts - self.point) @ self.normal

    def spec(self):
        return ",".join(repr(float(v)) for v in (*self.normal, *self.point))

    def __eq__(self, other):
        if not isinstance(other, Plane):
            return NotImplemented
        return np.array_equal(self.normal, other.normal) and np.array_equal(
            self.point, other.point
        )

    def __hash__(self):
        return hash((tuple(self.normal), tuple(self.point)))


X0_PLANE = Plane(np.array([1.0, 0.0, 0.0]), np.zeros(3))


@dataclass(frozen=True, eq=False)
class ReflectionMap:
    """Affine reflection p -> A p + t."""

    A: np.ndarray
    t: np.ndarray
    plane: Plane = None

    def __call__(self, cloud):
        return reflect_cloud(cloud, self)


def make_reflection(plane):
    """Return the Householder pair (A, t) for ``plane``.

    >>> m = make_reflection(Plane([0.0, 1.0, 0.0], [0.0, 1.0, 0.0]))
    >>> m.A.diagonal().tolist(), m.t.tolist()
    ([1.0, -1.0, 1.0], [0.0, 2.0, 0.0])
    """
    n = plane.normal
    norm = float(np.linalg.norm(n))
    if abs(norm - 1.0) > UNIT_TOL:
        raise InvalidPlaneError(f"plane normal must be unit length, |n| = {norm!r}")
    nnT = np.outer(n, n)
    A = np.eye(3) - 2.0 * nnT
    t = 2.0 * (nnT @ plane.point)
    return ReflectionMap(A, t, plane)


def reflect_cloud(cloud, reflection):
    """Apply ``reflection`` to every point, keeping count and order."""
    pts = check_cloud(cloud, allow_empty=True)
    if reflection.plane is not None and reflection.plane.is_x0:
        return mirror_x(pts)
    return pts @ reflection.A.T + reflection.t


def mirror_x(cloud):
    """Exact reflection about x = 0 (negates the x column)."""
    out = np.array(cloud, dtype=np.float64, copy=True)
    out[:, 0] = -out[:, 0]
    return out


class Halves(NamedTuple):
    left: np.ndarray
    right: np.ndarray

    @property
    def empty_side(self):
        """``"left"``, ``"right"``, ``"both"`` or None if both halves have points."""
        empty_left = self.left.shape[0] == 0
        empty_right = self.right.shape[0] == 0
        if empty_left and empty_right:
            return "both"
        if empty_left:
            return "left"
        if empty_right:
            return "right"
        return None


def split_halves(cloud, dedup_boundary=False):
    """Split at x = 0 into left (x <= 0) and right (x >= 0).

    Points exactly on the plane land in both halves unless
    ``dedup_boundary`` is set, in which case they go right only.
    """
    pts = check_cloud(cloud, allow_empty=True)
    x = pts[:, 0]
    left_mask = x < 0 if dedup_boundary else x <= 0
    return Halves(pts[left_mask], pts[x >= 0])


def make_half_object(cloud, dedup_boundary=False):
    """Mirror the left half onto the right and concatenate: A' followed by B."""
    left, right = split_halves(cloud, dedup_boundary=dedup_boundary)
    mirrored = mirror_x(left)
    mirrored[:, 0] += 0.0  # -0.0 -> 0.0 for points on the plane
    return np.concatenate([mirrored, right], axis=0)


def reconstruct_full(half, plane=X0_PLANE):
    """Concatenate ``half`` with its mirror image; the count doubles."""
    pts = check_cloud(half, allow_empty=True)
    return np.concatenate([pts, reflect_cloud(pts, make_reflection(plane))], axis=0)
