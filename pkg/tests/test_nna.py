import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from halfsym.exceptions import InvalidInputError
from halfsym.metrics import nna_from_matrix, one_nn_accuracy, pairwise_distances

from oracles import brute_chamfer, brute_emd, brute_nna


def _family(rng, n, npts, center=0.0):
    return [rng.normal(size=(npts, 3)) * rng.uniform(0.5, 1.5, size=3) + center for _ in range(n)]


def test_duplicates_give_zero():
    rng = np.random.default_rng(0)
    shapes = _family(rng, 3, 32)
    for distance in ("cd", "emd"):
        res = one_nn_accuracy(shapes, [s.copy() for s in shapes], distance=distance, return_details=True)
        assert res.accuracy == 0.0
        assert res.nearest.tolist() == [3, 4, 5, 0, 1, 2]
        assert np.all(res.nearest_distance == 0.0)


def test_duplicate_enumeration_by_hand():
    # three shapes duplicated: each row's zero-distance twin is in the other set
    d = np.array([[0, 5, 6, 0, 5, 6], [5, 0, 7, 5, 0, 7], [6, 7, 0, 6, 7, 0]] * 2, dtype=float)
    assert nna_from_matrix(d, 3).accuracy == 0.0
    assert brute_nna(d, 3) == 0.0


def test_separated_families_give_one():
    rng = np.random.default_rng(1)
    gen, ref = _family(rng, 8, 32, 0.0), _family(rng, 8, 32, 50.0)
    assert one_nn_accuracy(gen, ref) == 1.0
    assert one_nn_accuracy(gen, ref, distance="emd") == 1.0


def test_tie_counts_as_misclassified():
    d = np.array([[0, 1, 1], [1, 0, 2], [1, 2, 0]], dtype=float)
    res = nna_from_matrix(d, 2)
    assert res.ties == 1
    assert not res.correct[0]
    assert res.accuracy == brute_nna(d, 2)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_pruned_cd_matches_full_matrix(n_gen, n_ref, seed):
    rng = np.random.default_rng(seed)
    npts = int(rng.integers(1, 40))
    gen = _family(rng, n_gen, npts)
    ref = _family(rng, n_ref, npts, 0.3)
    if n_gen + n_ref < 2:
        return
    union = gen + ref
    full = np.array([[brute_chamfer(a, b) if a is not b else 0.0 for b in union] for a in union])
    got = one_nn_accuracy(gen, ref, return_details=True)
    want = nna_from_matrix(full, n_gen)
    assert got.accuracy == want.accuracy == brute_nna(full, n_gen)
    assert np.array_equal(got.nearest, want.nearest)
    assert np.allclose(got.nearest_distance, want.nearest_distance, rtol=1e-12)


def test_pruned_cd_with_exact_ties():
    # translated copies give exactly tied distances at a coarse grid
    base = np.array([[0.0, 0, 0], [1.0, 0, 0], [0.0, 1, 0]])
    shapes = [base + [k, 0, 0] for k in (0.0, 2.0, -2.0, 4.0)]
    got = one_nn_accuracy(shapes[:2], shapes[2:], return_details=True)
    full = pairwise_distances(shapes)
    want = nna_from_matrix(full, 2)
    assert got.ties == want.ties >= 1
    assert got.accuracy == want.accuracy == brute_nna(full, 2)
    assert np.array_equal(got.nearest, want.nearest)


def test_emd_matrix_matches_enumeration():
    rng = np.random.default_rng(4)
    shapes = _family(rng, 5, 6)
    d = pairwise_distances(shapes, distance="emd")
    for i in range(5):
        for j in range(i + 1, 5):
            assert d[i, j] == pytest.approx(brute_emd(shapes[i], shapes[j]), rel=1e-12)


def test_same_distribution_near_half():
    rng = np.random.default_rng(5)
    accs = [one_nn_accuracy(_family(rng, 40, 64), _family(rng, 40, 64)) for _ in range(3)]
    assert 0.35 <= np.mean(accs) <= 0.65


def test_invalid_inputs():
    rng = np.random.default_rng(6)
    with pytest.raises(InvalidInputError):
        one_nn_accuracy(_family(rng, 2, 10), _family(rng, 2, 11))
    with pytest.raises(InvalidInputError):
        one_nn_accuracy(_family(rng, 2, 10), [])
    with pytest.raises(InvalidInputError):
        one_nn_accuracy(_family(rng, 2, 10), _family(rng, 2, 10), distance="l2")
    with pytest.raises(InvalidInputError):
        nna_from_matrix(np.zeros((3, 2)), 1)
