import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from halfsym.estimators import (
    Denormalizer,
    FarthestPointSampler,
    FrechetPointDistance,
    HalfObjectTransformer,
    MirrorReconstructor,
    OneNNAccuracy,
    ShapeNormalizer,
    SymmetryScorer,
)
from halfsym.exceptions import InvalidInputError
from halfsym.metrics import symmetry_score

from conftest import symmetric_shape


@pytest.fixture
def shapes():
    rng = np.random.default_rng(0)
    return [symmetric_shape(rng, 64) for _ in range(6)]


def test_params_and_clone():
    est = FarthestPointSampler(n_points=128, start=3)
    assert est.get_params() == {"n_points": 128, "start": 3, "random_state": None}
    c = clone(est).set_params(n_points=8)
    assert c.n_points == 8 and est.n_points == 128


def test_half_then_mirror_pipeline(shapes):
    pipe = make_pipeline(HalfObjectTransformer(), MirrorReconstructor(), FarthestPointSampler(n_points=64))
    out = pipe.fit_transform(shapes)
    assert len(out) == 6 and all(o.shape == (64, 3) for o in out)
    full = make_pipeline(HalfObjectTransformer(), MirrorReconstructor()).fit_transform(shapes)
    assert all(symmetry_score(f).value <= 1e-12 for f in full)


def test_normalizer_round_trip(shapes):
    norm = ShapeNormalizer().fit(shapes)
    z = norm.transform(shapes)
    back = norm.inverse_transform(z)
    assert all(np.allclose(a, b, atol=1e-12) for a, b in zip(back, shapes))
    d = Denormalizer(mean=norm.mean_, scale=norm.scale_).fit_transform(z)
    assert all(np.array_equal(a, b) for a, b in zip(d, back))


def test_normalizer_not_fitted(shapes):
    with pytest.raises(NotFittedError):
        ShapeNormalizer().transform(shapes)


def test_symmetry_scorer(shapes):
    s = SymmetryScorer(bins=5).fit(shapes, ids=list("abcdef"))
    assert s.report_.n == 6 and s.report_.mean <= 1e-12
    assert s.transform(shapes).shape == (6, 1)


def test_fpd_and_nna(shapes):
    rng = np.random.default_rng(1)
    other = [symmetric_shape(rng, 64) + 30.0 for _ in range(6)]
    fpd = FrechetPointDistance().fit(shapes + other)
    with pytest.warns(RuntimeWarning):
        assert fpd.score(shapes + other) <= 1e-6
    nna = OneNNAccuracy().fit(other)
    assert nna.score(shapes) == 1.0
    with pytest.raises(NotFittedError):
        OneNNAccuracy().score(shapes)


def test_validation_errors():
    with pytest.raises(InvalidInputError):
        MirrorReconstructor().fit_transform([np.zeros((3, 2))])
    with pytest.raises(InvalidInputError):
        HalfObjectTransformer().fit_transform([])
