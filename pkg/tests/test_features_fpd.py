import numpy as np
import pytest

from halfsym.exceptions import InvalidInputError, MissingFeatureError, ParseError
from halfsym.metrics import (
    FeatureTable,
    GaussianSummary,
    MomentFeatures,
    extract_features,
    frechet_point_distance,
)

from oracles import frechet_closed_form, gaussian_with_moments


def _sphere(rng, n):
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def test_moment_layout_and_label():
    f = extract_features(np.random.default_rng(0).normal(size=(200, 3)))
    assert f.shape == (63,)
    assert MomentFeatures.label == "geometric-moments-63"


def test_sphere_centroid_near_zero():
    n = 4000
    f = extract_features(_sphere(np.random.default_rng(1), n))
    assert np.all(np.abs(f[:3]) < 3 / np.sqrt(n))


def test_translation_invariance():
    c = np.random.default_rng(2).normal(size=(300, 3))
    a = extract_features(c)
    b = extract_features(c + [5.0, -3.0, 2.0])
    assert np.allclose(a[3:], b[3:], rtol=0, atol=1e-9)
    assert np.allclose(b[:3] - a[:3], [5.0, -3.0, 2.0])


def test_deterministic():
    c = np.random.default_rng(3).normal(size=(300, 3))
    assert np.array_equal(extract_features(c), extract_features(c.copy()))


def test_degenerate_cloud_is_finite():
    assert np.all(np.isfinite(extract_features(np.ones((5, 3)))))


def test_feature_table_round_trip(tmp_path):
    table = FeatureTable({"b": [1.0, 2.0], "a": [0.1, 1e-300]})
    path = tmp_path / "f.csv"
    table.to_csv(path)
    assert path.read_text().splitlines()[0] == "id,f0,f1"
    back = FeatureTable.from_csv(path)
    assert back.label == "external:f.csv"
    assert np.array_equal(back(shape_id="a"), [0.1, 1e-300])
    assert extract_features(None, back, shape_id="b").tolist() == [1.0, 2.0]
    with pytest.raises(MissingFeatureError):
        back(shape_id="zzz")


@pytest.mark.parametrize(
    "text, offset",
    [
        ("name,f0\n", 0),
        ("id,f0,f1\na,1,2\nb,1\n", 15),
        ("id,f0\na,1\nb,x\n", 10),
        ("id,f0\na,1\na,2\n", 10),
    ],
)
def test_feature_table_errors(tmp_path, text, offset):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(ParseError) as info:
        FeatureTable.from_csv(path)
    assert info.value.offset == offset


def test_fpd_self_is_zero():
    f = np.random.default_rng(4).normal(size=(500, 16))
    assert frechet_point_distance(f, f) <= 1e-6


def test_fpd_unit_shift():
    f = np.random.default_rng(5).normal(size=(20_000, 4))
    g = f.copy()
    g[:, 2] += 1.0
    assert frechet_point_distance(f, g) == pytest.approx(1.0, abs=1e-9)


def test_fpd_closed_form_small():
    rng = np.random.default_rng(6)
    mu1, mu2 = rng.normal(size=5), rng.normal(size=5)
    a, b = rng.normal(size=(5, 5)), rng.normal(size=(5, 5))
    s1, s2 = a @ a.T + 0.1 * np.eye(5), b @ b.T + 0.1 * np.eye(5)
    f1 = gaussian_with_moments(rng, 2000, mu1, s1)
    f2 = gaussian_with_moments(rng, 3000, mu2, s2)
    assert frechet_point_distance(f1, f2) == pytest.approx(
        frechet_closed_form(mu1, s1, mu2, s2), rel=1e-9, abs=1e-9
    )


def test_fpd_frozen_value():
    # 1-D: (0-3)^2 + 1 + 4 - 2*sqrt(1*4) = 9 + 5 - 4 = 10
    f1 = np.array([[-1.0], [1.0]])  # mean 0, var 2 (unbiased)
    f2 = np.array([[3.0 - 2.0], [3.0 + 2.0]])  # mean 3, var 8
    assert frechet_point_distance(f1, f2) == pytest.approx(9 + 2 + 8 - 2 * 4, abs=1e-12)


def test_summary_warns_on_rank_deficiency():
    with pytest.warns(RuntimeWarning, match="rank deficient"):
        GaussianSummary.fit(np.random.default_rng(7).normal(size=(4, 8)))


def test_fpd_dimension_mismatch():
    with pytest.raises(InvalidInputError):
        frechet_point_distance(np.zeros((5, 3)), np.zeros((5, 4)))
