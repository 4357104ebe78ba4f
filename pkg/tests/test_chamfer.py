import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from halfsym.exceptions import InvalidInputError
from halfsym.geometry import X0_PLANE, Plane, make_half_object, reconstruct_full
from halfsym.metrics import chamfer_distance, pairwise_chamfer, symmetry_score

from oracles import brute_chamfer


def test_identical_is_zero():
    a = np.random.default_rng(0).normal(size=(64, 3))
    assert chamfer_distance(a, a) == 0.0


def test_single_pair():
    assert chamfer_distance([[0.0, 0, 0]], [[1.0, 0, 0]]) == 2.0


def test_two_to_one():
    assert chamfer_distance([[0.0, 0, 0], [2.0, 0, 0]], [[1.0, 0, 0]]) == 2.0


def test_symmetric_in_arguments():
    rng = np.random.default_rng(1)
    a, b = rng.normal(size=(40, 3)), rng.normal(size=(70, 3))
    assert chamfer_distance(a, b) == pytest.approx(chamfer_distance(b, a), rel=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 80), st.integers(1, 80), st.integers(0, 2**32 - 1))
def test_matches_brute_force(n1, n2, seed):
    rng = np.random.default_rng(seed)
    a, b = rng.normal(size=(n1, 3)), rng.uniform(-2, 2, size=(n2, 3))
    assert chamfer_distance(a, b) == pytest.approx(brute_chamfer(a, b), rel=1e-12, abs=1e-300)


def test_rejects_empty():
    with pytest.raises(InvalidInputError):
        chamfer_distance(np.empty((0, 3)), [[0.0, 0, 0]])


def test_pairwise_matrix_matches_single_calls():
    rng = np.random.default_rng(2)
    clouds = [rng.normal(size=(50, 3)) for _ in range(6)]
    d = pairwise_chamfer(clouds)
    assert np.array_equal(d, d.T)
    assert np.all(np.diag(d) == 0)
    for i in range(6):
        for j in range(i + 1, 6):
            assert d[i, j] == pytest.approx(brute_chamfer(clouds[i], clouds[j]), rel=1e-12)


def test_pairwise_requires_equal_sizes():
    with pytest.raises(InvalidInputError):
        pairwise_chamfer([np.zeros((3, 3)), np.zeros((4, 3))])


def test_symmetry_of_reconstruction_is_zero():
    half = np.random.default_rng(3).normal(size=(500, 3))
    s = symmetry_score(reconstruct_full(half))
    assert s.value <= 1e-12
    assert s.plane == X0_PLANE
    assert float(s) == s.value


def test_symmetry_about_offset_plane():
    plane = Plane.from_normal([0.0, 1.0, 1.0], [0.0, 2.0, -1.0])
    half = np.random.default_rng(4).normal(size=(200, 3))
    assert symmetry_score(reconstruct_full(half, plane), plane).value <= 1e-12
    assert symmetry_score(reconstruct_full(half, plane), X0_PLANE).value > 1e-3


def test_half_object_is_far_from_symmetric():
    rng = np.random.default_rng(5)
    cloud = rng.normal(size=(400, 3))
    assert symmetry_score(make_half_object(cloud)).value > 5 * symmetry_score(cloud).value


def test_symmetry_score_frozen_value():
    # hand-checkable: points (1,0,0),(3,0,0) vs mirrors (-1,0,0),(-3,0,0):
    # nearest squared distances are 4 and 16 in each direction
    assert symmetry_score([[1.0, 0, 0], [3.0, 0, 0]]).value == 20.0
