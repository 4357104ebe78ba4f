import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from halfsym.dataset import count_points, load_cloud, save_cloud
from halfsym.exceptions import CloudIOError, InvalidInputError, ParseError


def test_xyz_example(tmp_path):
    p = tmp_path / "a.xyz"
    p.write_text("0 0 0\n1 2 3")
    assert load_cloud(p).tolist() == [[0.0, 0, 0], [1.0, 2, 3]]


def test_xyz_comments_and_blank_lines(tmp_path):
    p = tmp_path / "a.xyz"
    p.write_text("# header\n\n1 2 3  # trailing\n4 5 6\n")
    assert load_cloud(p).shape == (2, 3)


def test_xyz_error_offset(tmp_path):
    p = tmp_path / "a.xyz"
    p.write_text("1 2 3\n4 5\n")
    with pytest.raises(ParseError) as info:
        load_cloud(p)
    assert info.value.offset == 6
    assert "byte 6" in str(info.value)


def test_npy_float32_15k(tmp_path):
    p = tmp_path / "a.npy"
    np.save(p, np.random.default_rng(0).normal(size=(15_000, 3)).astype(np.float32))
    cloud = load_cloud(p)
    assert cloud.shape == (15_000, 3) and cloud.dtype == np.float64
    assert count_points(p) == 15_000


def test_npy_wrong_shape(tmp_path):
    p = tmp_path / "a.npy"
    np.save(p, np.zeros((10, 4)))
    with pytest.raises(ParseError):
        load_cloud(p)


@pytest.mark.parametrize(
    "arr",
    [np.zeros((10, 3), dtype=np.int32), np.zeros((10, 3), dtype=">f8"), np.asfortranarray(np.zeros((10, 3)))],
)
def test_npy_unsupported(tmp_path, arr):
    p = tmp_path / "a.npy"
    np.save(p, arr)
    with pytest.raises(ParseError):
        load_cloud(p)


def test_npy_truncated(tmp_path):
    p = tmp_path / "a.npy"
    np.save(p, np.zeros((10, 3)))
    p.write_bytes(p.read_bytes()[:-8])
    with pytest.raises(ParseError, match="truncated"):
        load_cloud(p)


def test_nan_rejected(tmp_path):
    p = tmp_path / "a.npy"
    np.save(p, np.array([[np.nan, 0, 0]]))
    with pytest.raises(InvalidInputError, match="validation failed"):
        load_cloud(p)


def test_ply_with_extra_properties(tmp_path):
    p = tmp_path / "a.ply"
    p.write_text(
        "ply\nformat ascii 1.0\ncomment made by hand\n"
        "element vertex 2\nproperty float nx\nproperty float x\nproperty float y\nproperty float z\n"
        "element face 1\nproperty list uchar int vertex_indices\nend_header\n"
        "9 1 2 3\n9 4 5 6\n3 0 1 1\n"
    )
    assert load_cloud(p).tolist() == [[1.0, 2, 3], [4.0, 5, 6]]


@pytest.mark.parametrize(
    "text",
    [
        "plx\n",
        "ply\nformat binary_little_endian 1.0\nelement vertex 1\nproperty float x\nend_header\n",
        "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\nend_header\n1 2\n",
        "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\nproperty float z\nend_header\n1 2 3\n",
    ],
)
def test_ply_errors(tmp_path, text):
    p = tmp_path / "a.ply"
    p.write_text(text)
    with pytest.raises(ParseError):
        load_cloud(p)


def test_missing_file_and_unknown_format(tmp_path):
    with pytest.raises(CloudIOError):
        load_cloud(tmp_path / "nope.npy")
    with pytest.raises(InvalidInputError):
        load_cloud(tmp_path / "a.obj")


finite = arrays(np.float64, st.tuples(st.integers(1, 30), st.just(3)), elements=st.floats(-1e6, 1e6, allow_subnormal=False))


@settings(max_examples=30, deadline=None)
@given(finite)
def test_npy_round_trip_bitwise(tmp_path_factory, cloud):
    p = tmp_path_factory.mktemp("rt") / "c.npy"
    save_cloud(cloud, p)
    assert np.array_equal(load_cloud(p), cloud)


@settings(max_examples=30, deadline=None)
@given(finite, st.sampled_from(["xyz", "ply"]))
def test_text_round_trip_9_digits(tmp_path_factory, cloud, fmt):
    p = tmp_path_factory.mktemp("rt") / f"c.{fmt}"
    save_cloud(cloud, p)
    back = load_cloud(p)
    assert np.allclose(back, cloud, rtol=1e-7, atol=1e-300)


def test_save_is_byte_stable(tmp_path):
    c = np.random.default_rng(1).normal(size=(15_000, 3))
    save_cloud(c, tmp_path / "a.npy")
    save_cloud(c, tmp_path / "b.npy")
    assert (tmp_path / "a.npy").read_bytes() == (tmp_path / "b.npy").read_bytes()
    assert count_points(tmp_path / "a.npy") == 15_000
    save_cloud(c, tmp_path / "c.npy", dtype="float32")
    assert load_cloud(tmp_path / "c.npy").shape == (15_000, 3)
